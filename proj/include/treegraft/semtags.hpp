#pragma once

// Named-entity and modality tag inventories, standoff annotation files, and
// the precedence order used when several tags compete for one node.

#include <compare>
#include <cstddef>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "treegraft/treebank.hpp"

namespace treegraft {

enum class TagKind { NamedEntity, ModalityTrigger, ModalityTarget };

// Standoff column spelling: NE, TRIG, TARG.
std::string_view kind_code(TagKind kind);
TagKind parse_kind_code(std::string_view code);  // throws Error on unknown codes

struct SemanticTag {
    std::size_t sentence_id = 0;
    Span span;
    TagKind kind = TagKind::NamedEntity;
    std::string label;

    friend bool operator==(const SemanticTag&, const SemanticTag&) = default;
};

// The text grafted onto a node: the label itself for named entities,
// "TRIG-<label>" / "TARG-<label>" for modality triggers and targets.
std::string semantic_part(const SemanticTag& tag);

const std::vector<std::string>& named_entity_labels();

// Most specific (Require) first, least specific (Negation) last.
const std::vector<std::string>& modality_labels();

bool is_named_entity_label(std::string_view label);
bool is_modality_label(std::string_view label);

// Rank of a modality label: 0 for Negation up to 26 for Require. -1 if unknown.
int modality_specificity(std::string_view label);

// Which tag family is grafted first. The default grafts named entities first,
// so modalities win any contested node.
enum class GraftOrder { NamedEntitiesFirst, ModalitiesFirst };

struct PrecedenceKey {
    int phase = 0;
    int specificity = 0;

    friend auto operator<=>(const PrecedenceKey&, const PrecedenceKey&) = default;
};

// Sorting ascending by this key and applying tags in that order makes the
// highest-precedence tag the last one applied.
PrecedenceKey precedence_key(const SemanticTag& tag, GraftOrder order = GraftOrder::NamedEntitiesFirst);

// Stable sort by precedence_key; tags with equal keys keep their input order.
std::vector<SemanticTag> sort_for_grafting(std::vector<SemanticTag> tags,
                                           GraftOrder order = GraftOrder::NamedEntitiesFirst);

struct StandoffOptions {
    bool allow_extra_labels = false;    // pass unknown labels through
    std::set<std::string> extra_labels;  // accepted in addition to the inventories
};

using TagsBySentence = std::map<std::size_t, std::vector<SemanticTag>>;

// Reads `sentence_id TAB start TAB end TAB kind TAB label` lines. Lines starting
// with '#' and blank lines are skipped. Spans are checked against sentence
// length later, when the tree is known. Throws FormatError.
TagsBySentence parse_standoff(std::istream& in, const StandoffOptions& options = {});
TagsBySentence parse_standoff(std::string_view text, const StandoffOptions& options = {});

std::string format_standoff(const SemanticTag& tag);

}  // namespace treegraft
