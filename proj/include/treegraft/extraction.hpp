#pragma once

// Synchronous CFG rule extraction from word-aligned sentence pairs, with
// nonterminal labels read off the (optionally grafted) target-side tree.

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "treegraft/corpus.hpp"
#include "treegraft/treebank.hpp"

namespace treegraft {

struct PhrasePair {
    Span source;
    Span target;

    friend auto operator<=>(const PhrasePair&, const PhrasePair&) = default;
};

// All tight alignment-consistent phrase pairs with both sides no longer than
// max_length, sorted by (source, target).
std::vector<PhrasePair> extract_phrase_pairs(const Alignment& alignment, std::size_t source_length,
                                             std::size_t target_length, std::size_t max_length);
std::vector<PhrasePair> extract_phrase_pairs(const SentencePair& pair, std::size_t max_length);

enum class LabelMode { Hiero, Samt };

struct Label {
    enum class Form { Constituent, Concat, MissingRight, MissingLeft, Fallback };

    Form form = Form::Fallback;
    std::string first;   // Constituent label, left part of A+B, or the full constituent A of A/B and B\A
    std::string second;  // right part of A+B, or the missing constituent B

    // "A", "A+B", "A/B", "B\A" or "X".
    std::string rendered() const;

    friend bool operator==(const Label&, const Label&) = default;
};

inline constexpr std::string_view kFallbackLabel = "X";

// Labels a target span. Hiero mode always yields the fallback label. Samt mode
// takes the first of: exact constituent, A+B, A/B, B\A, fallback; within a
// clause the tightest enclosing constituent and the highest node of each
// chain win. Throws Error when the span does not fit the tree.
Label samt_label(const SpanIndex& index, Span span, LabelMode mode = LabelMode::Samt);

// A right-hand-side symbol: a terminal word, or a labeled nonterminal with a
// co-index k >= 1 shared between the two sides.
struct Symbol {
    std::string text;
    int index = 0;

    bool is_nonterminal() const { return index > 0; }

    static Symbol terminal(std::string word) { return {std::move(word), 0}; }
    static Symbol nonterminal(std::string label, int index) { return {std::move(label), index}; }

    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

using Rhs = std::vector<Symbol>;
using Features = std::map<std::string, double>;

struct ScfgRule {
    std::string lhs;
    Rhs source;
    Rhs target;
    Features features;

    std::size_t arity() const;
};

std::string format_rhs(const Rhs& rhs);
Rhs parse_rhs(std::string_view text);  // throws Error

// "[LHS] ||| source ||| target ||| name=value ..." with nonterminals as [LABEL,k].
std::string format_rule(const ScfgRule& rule);
ScfgRule parse_rule(std::string_view line);  // throws Error

struct ExtractionConfig {
    std::size_t max_phrase_length = 10;
    std::size_t max_source_symbols = 5;
    std::size_t max_nonterminals = 2;
    bool forbid_adjacent_source_nonterminals = true;
    LabelMode mode = LabelMode::Samt;
};

// Rule instances (count 1 each, no features) for one sentence pair. Samt mode
// requires pair.target_tree.
std::vector<ScfgRule> extract_rules(const SentencePair& pair, const ExtractionConfig& config);

struct Grammar {
    std::vector<ScfgRule> rules;  // sorted by (lhs, source, target)
    std::vector<std::pair<std::string, std::string>> metadata;
};

// Feature names written by GrammarScorer.
namespace feature {
inline constexpr std::string_view kTargetGivenSource = "p_tgt_lhs_given_src";
inline constexpr std::string_view kSourceGivenTarget = "p_src_given_tgt_lhs";
inline constexpr std::string_view kCount = "count";
inline constexpr std::string_view kSourceWords = "src_words";
inline constexpr std::string_view kTargetWords = "tgt_words";
}  // namespace feature

// Counts rule instances and turns them into a deduplicated grammar with
// relative-frequency features. Merging is order-independent.
class GrammarScorer {
public:
    void add(const ScfgRule& instance);
    void add(const std::vector<ScfgRule>& instances);
    void merge(const GrammarScorer& other);

    std::size_t instances() const { return instances_; }
    Grammar finish() const;

private:
    using Key = std::tuple<std::string, std::string, std::string>;  // lhs, source, target
    std::map<Key, std::size_t> counts_;
    std::size_t instances_ = 0;
};

Grammar score_grammar(const std::vector<ScfgRule>& instances);

void write_grammar(const Grammar& grammar, std::ostream& out);
Grammar read_grammar(std::istream& in);  // throws FormatError

}  // namespace treegraft
