#pragma once

// Attaches named-entity and modality tags to syntactic constituents.
//
// For each tag, in precedence order:
//   * span equals a node span       -> label the highest such node (Overlay if
//                                      it already carried a tag)
//   * span equals a run of adjacent -> named entities: insert an NP node over
//     daughters of one node            the run; modality tags: skip
//   * anything else                 -> crossing brackets, skip

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treegraft/semtags.hpp"
#include "treegraft/treebank.hpp"

namespace treegraft {

using GraftedLabel = NodeLabel;

enum class MatchKind { Exact, AdjacentDaughters, Crossing };

struct Match {
    MatchKind kind = MatchKind::Crossing;
    NodePath node;  // Exact: the matched node; AdjacentDaughters: the parent
    // AdjacentDaughters only: matched children are [first_child, last_child).
    std::size_t first_child = 0;
    std::size_t last_child = 0;
};

// Throws Error when the span is empty, reversed, or runs past the yield.
Match classify_match(const Tree& tree, Span span);
Match classify_match(const SpanIndex& index, Span span);

enum class GraftCase { ExactGraft, SplitInsert, Overlay, CrossingSkipped, NoNodeSkipped };
inline constexpr std::size_t kGraftCaseCount = 5;

const char* graft_case_name(GraftCase c);

struct GraftOutcome {
    GraftCase graft_case = GraftCase::CrossingSkipped;
    std::optional<NodePath> node;  // labeled or inserted node, when any
};

// In-place form used by graft_sentence. Throws Error on an invalid span.
GraftOutcome graft_in_place(Tree& tree, const SemanticTag& tag);

std::pair<Tree, GraftOutcome> graft_one(Tree tree, const SemanticTag& tag);

struct GraftDiagnostic {
    std::size_t sentence_id = 0;
    SemanticTag tag;
    std::optional<GraftCase> graft_case;  // empty when the tag was rejected
    std::string message;
};

struct GraftReport {
    std::array<std::size_t, kGraftCaseCount> counts{};
    std::size_t rejected = 0;  // tags with spans that do not fit the sentence
    std::size_t sentences = 0;
    std::vector<GraftDiagnostic> diagnostics;

    std::size_t count(GraftCase c) const { return counts[static_cast<std::size_t>(c)]; }
    std::size_t total_tags() const;

    GraftReport& operator+=(const GraftReport& other);
};

// `case TAB count` lines, one per outcome plus Rejected.
void write_report_tsv(const GraftReport& report, std::ostream& out);

std::pair<Tree, GraftReport> graft_sentence(Tree tree, const std::vector<SemanticTag>& tags,
                                            GraftOrder order = GraftOrder::NamedEntitiesFirst);

struct GraftCorpusOptions {
    GraftOrder order = GraftOrder::NamedEntitiesFirst;
    unsigned jobs = 1;
    std::ostream* warnings = nullptr;
};

// Line i of `out` is sentence i grafted with its tags. Blank tree lines pass
// through blank; untouched trees are copied verbatim. Throws Error when the
// tags index sentences beyond the tree file.
GraftReport graft_corpus(std::istream& trees, const TagsBySentence& tags, std::ostream& out,
                         const GraftCorpusOptions& options = {});

}  // namespace treegraft
