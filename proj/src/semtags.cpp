#include "treegraft/semtags.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "treegraft/error.hpp"

namespace treegraft {

std::string_view kind_code(TagKind kind) {
    switch (kind) {
        case TagKind::NamedEntity: return "NE";
        case TagKind::ModalityTrigger: return "TRIG";
        case TagKind::ModalityTarget: return "TARG";
    }
    return "NE";
}

TagKind parse_kind_code(std::string_view code) {
    if (code == "NE") return TagKind::NamedEntity;
    if (code == "TRIG") return TagKind::ModalityTrigger;
    if (code == "TARG") return TagKind::ModalityTarget;
    throw Error("unknown tag kind '" + std::string(code) + "' (expected NE, TRIG or TARG)");
}

std::string semantic_part(const SemanticTag& tag) {
    switch (tag.kind) {
        case TagKind::NamedEntity: return tag.label;
        case TagKind::ModalityTrigger: return "TRIG-" + tag.label;
        case TagKind::ModalityTarget: return "TARG-" + tag.label;
    }
    return tag.label;
}

const std::vector<std::string>& named_entity_labels() {
    static const std::vector<std::string> labels = {
        "AGE",     "DATE",         "FACILITY",         "GPE",     "GPE-ite", "LOCATION", "MONEY",
        "OCCUPATION", "ORGANIZATION", "ORGANIZATION-ite", "PERCENT", "PERSON",  "TIME",
    };
    return labels;
}

const std::vector<std::string>& modality_labels() {
    // Row-major reading of the two-column modality table (each tag beside its
    // negated partner).
    static const std::vector<std::string> labels = {
        "Require",         "NOTPermit",          "Permit",          "NOTRequire",
        "Succeed",         "NOTSucceed",         "SucceedNegation", "NOTSucceedNegation",
        "Effort",          "NOTEffort",          "EffortNegation",  "NOTEffortNegation",
        "Intend",          "NOTIntend",          "IntendNegation",  "NOTIntendNegation",
        "Able",            "NOTAble",            "AbleNegation",    "NOTAbleNegation",
        "Want",            "NOTWant",            "Belief",          "NOTBelief",
        "Firm_Belief",     "NOTFirm_Belief",     "Negation",
    };
    return labels;
}

bool is_named_entity_label(std::string_view label) {
    const auto& ls = named_entity_labels();
    return std::find(ls.begin(), ls.end(), label) != ls.end();
}

bool is_modality_label(std::string_view label) { return modality_specificity(label) >= 0; }

int modality_specificity(std::string_view label) {
    const auto& ls = modality_labels();
    auto it = std::find(ls.begin(), ls.end(), label);
    if (it == ls.end()) return -1;
    return static_cast<int>(ls.size() - 1 - static_cast<std::size_t>(it - ls.begin()));
}

PrecedenceKey precedence_key(const SemanticTag& tag, GraftOrder order) {
    int phase = 0;
    switch (tag.kind) {
        case TagKind::NamedEntity: phase = order == GraftOrder::NamedEntitiesFirst ? 0 : 2; break;
        case TagKind::ModalityTrigger: phase = order == GraftOrder::NamedEntitiesFirst ? 1 : 0; break;
        case TagKind::ModalityTarget: phase = order == GraftOrder::NamedEntitiesFirst ? 2 : 1; break;
    }
    int specificity = 0;
    if (tag.kind != TagKind::NamedEntity) specificity = std::max(0, modality_specificity(tag.label));
    return {phase, specificity};
}

std::vector<SemanticTag> sort_for_grafting(std::vector<SemanticTag> tags, GraftOrder order) {
    std::stable_sort(tags.begin(), tags.end(), [order](const SemanticTag& a, const SemanticTag& b) {
        return precedence_key(a, order) < precedence_key(b, order);
    });
    return tags;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    while (true) {
        std::size_t tab = line.find('\t', begin);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(begin));
            break;
        }
        fields.push_back(line.substr(begin, tab - begin));
        begin = tab + 1;
    }
    return fields;
}

std::size_t parse_index(std::string_view field, const char* what, std::size_t line) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw FormatError(std::string("bad ") + what + " '" + std::string(field) + "'", line);
    }
    return value;
}

bool label_allowed(TagKind kind, const std::string& label, const StandoffOptions& options) {
    if (options.allow_extra_labels || options.extra_labels.count(label)) return true;
    return kind == TagKind::NamedEntity ? is_named_entity_label(label) : is_modality_label(label);
}

}  // namespace

TagsBySentence parse_standoff(std::istream& in, const StandoffOptions& options) {
    TagsBySentence out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() != 5) {
            throw FormatError("expected 5 tab-separated fields, found " + std::to_string(fields.size()), lineno);
        }
        SemanticTag tag;
        tag.sentence_id = parse_index(fields[0], "sentence id", lineno);
        tag.span.start = parse_index(fields[1], "span start", lineno);
        tag.span.end = parse_index(fields[2], "span end", lineno);
        try {
            tag.kind = parse_kind_code(fields[3]);
        } catch (const Error& e) {
            throw FormatError(e.what(), lineno);
        }
        tag.label = std::string(fields[4]);
        if (tag.label.empty()) throw FormatError("empty label", lineno);
        if (!label_allowed(tag.kind, tag.label, options)) {
            throw FormatError("unknown " + std::string(kind_code(tag.kind)) + " label '" + tag.label +
                                  "' (use --allow-extra-labels to accept it)",
                              lineno);
        }
        out[tag.sentence_id].push_back(std::move(tag));
    }
    return out;
}

TagsBySentence parse_standoff(std::string_view text, const StandoffOptions& options) {
    std::istringstream in{std::string(text)};
    return parse_standoff(in, options);
}

std::string format_standoff(const SemanticTag& tag) {
    return std::to_string(tag.sentence_id) + "\t" + std::to_string(tag.span.start) + "\t" +
           std::to_string(tag.span.end) + "\t" + std::string(kind_code(tag.kind)) + "\t" + tag.label;
}

}  // namespace treegraft
