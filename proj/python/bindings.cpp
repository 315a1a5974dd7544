#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "treegraft/corpus.hpp"
#include "treegraft/decoder.hpp"
#include "treegraft/error.hpp"
#include "treegraft/evalkit.hpp"
#include "treegraft/extraction.hpp"
#include "treegraft/grafting.hpp"
#include "treegraft/semtags.hpp"
#include "treegraft/treebank.hpp"

namespace py = pybind11;
using namespace treegraft;

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace {

using SpanTuple = std::pair<std::size_t, std::size_t>;
using TagTuple = std::tuple<std::size_t, std::size_t, std::string, std::string>;

SemanticTag to_tag(const TagTuple& t) {
    SemanticTag tag;
    tag.span = {std::get<0>(t), std::get<1>(t)};
    tag.kind = parse_kind_code(std::get<2>(t));
    tag.label = std::get<3>(t);
    return tag;
}

TagTuple from_tag(const SemanticTag& tag) {
    return {tag.span.start, tag.span.end, std::string(kind_code(tag.kind)), tag.label};
}

GraftOrder parse_order(const std::string& name) {
    if (name == "ne-first") return GraftOrder::NamedEntitiesFirst;
    if (name == "modality-first") return GraftOrder::ModalitiesFirst;
    throw Error("unknown graft order '" + name + "'");
}

LabelMode parse_label_mode(const std::string& name) {
    if (name == "samt") return LabelMode::Samt;
    if (name == "hiero") return LabelMode::Hiero;
    throw Error("unknown label mode '" + name + "'");
}

py::dict report_dict(const GraftReport& report) {
    py::dict d;
    for (std::size_t i = 0; i < kGraftCaseCount; ++i) {
        d[graft_case_name(static_cast<GraftCase>(i))] = report.counts[i];
    }
    d["Rejected"] = report.rejected;
    return d;
}

std::pair<std::string, py::dict> graft_text(const std::string& tree_text, const std::vector<TagTuple>& tags,
                                            const std::string& order) {
    std::vector<SemanticTag> converted;
    converted.reserve(tags.size());
    for (const auto& t : tags) converted.push_back(to_tag(t));
    auto [tree, report] = graft_sentence(parse_tree(tree_text), converted, parse_order(order));
    return {serialize_tree(tree), report_dict(report)};
}

std::map<std::size_t, std::vector<TagTuple>> standoff(const std::string& text, bool allow_extra_labels) {
    StandoffOptions options;
    options.allow_extra_labels = allow_extra_labels;
    std::map<std::size_t, std::vector<TagTuple>> out;
    for (const auto& [id, tags] : parse_standoff(text, options)) {
        auto& row = out[id];
        for (const auto& tag : tags) row.push_back(from_tag(tag));
    }
    return out;
}

std::vector<std::pair<SpanTuple, SpanTuple>> phrase_pairs(std::size_t source_length, std::size_t target_length,
                                                          const std::string& alignment, std::size_t max_length) {
    auto pairs = extract_phrase_pairs(parse_alignment(alignment, source_length, target_length), source_length,
                                      target_length, max_length);
    std::vector<std::pair<SpanTuple, SpanTuple>> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        out.push_back({{p.source.start, p.source.end}, {p.target.start, p.target.end}});
    }
    return out;
}

std::string label_span(const std::string& tree_text, std::size_t start, std::size_t end, const std::string& mode) {
    Tree tree = parse_tree(tree_text);
    SpanIndex index(tree);
    return samt_label(index, {start, end}, parse_label_mode(mode)).rendered();
}

SentencePair make_pair(const std::string& source, const std::string& target, const std::string& alignment,
                       const std::optional<std::string>& tree) {
    SentencePair pair;
    pair.source = split_tokens(source);
    pair.target = split_tokens(target);
    pair.alignment = parse_alignment(alignment, pair.source.size(), pair.target.size());
    if (tree) pair.target_tree = parse_tree(*tree);
    return pair;
}

ExtractionConfig extraction_config(const std::string& mode, std::size_t max_phrase_length,
                                   std::size_t max_source_symbols, std::size_t max_nonterminals) {
    ExtractionConfig config;
    config.mode = parse_label_mode(mode);
    config.max_phrase_length = max_phrase_length;
    config.max_source_symbols = max_source_symbols;
    config.max_nonterminals = max_nonterminals;
    return config;
}

std::vector<std::string> rules_for(const std::string& source, const std::string& target, const std::string& alignment,
                                   const std::optional<std::string>& tree, const std::string& mode,
                                   std::size_t max_phrase_length, std::size_t max_source_symbols,
                                   std::size_t max_nonterminals) {
    auto pair = make_pair(source, target, alignment, tree);
    auto config = extraction_config(mode, max_phrase_length, max_source_symbols, max_nonterminals);
    std::vector<std::string> out;
    for (const auto& rule : extract_rules(pair, config)) out.push_back(format_rule(rule));
    return out;
}

std::string grammar_from_rules(const std::vector<std::string>& rules) {
    std::vector<ScfgRule> instances;
    instances.reserve(rules.size());
    for (const auto& line : rules) instances.push_back(parse_rule(line));
    std::ostringstream out;
    write_grammar(score_grammar(instances), out);
    return out.str();
}

std::vector<std::pair<std::string, double>> decode_text(
    const std::string& grammar_text, const std::string& source, std::size_t k,
    const std::optional<std::map<std::string, double>>& weights) {
    std::istringstream in(grammar_text);
    Grammar grammar = read_grammar(in);
    WeightVector w = WeightVector::uniform();
    if (weights) {
        for (const auto& [name, value] : *weights) {
            if (name == "word_penalty") {
                w.word_penalty = value;
            } else {
                w.weights[name] = value;
            }
        }
    }
    DecoderOptions options;
    options.k = k;
    Decoder decoder(grammar, w, options);
    auto result = decoder.decode(split_tokens(source));
    std::vector<std::pair<std::string, double>> out;
    for (const auto& d : result.kbest) {
        std::string text;
        for (const auto& token : d->yield) {
            if (!text.empty()) text += ' ';
            text += token;
        }
        out.push_back({text, d->score});
    }
    return out;
}

py::dict bleu_report(const std::vector<std::string>& hypotheses,
                     const std::vector<std::vector<std::string>>& references, bool lowercase) {
    if (references.empty()) throw Error("at least one reference set is required");
    for (const auto& refs : references) {
        if (refs.size() != hypotheses.size()) throw Error("reference count does not match hypothesis count");
    }
    BleuStats total;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        auto prep = [&](const std::string& s) { return split_tokens(lowercase ? lowercase_ascii(s) : s); };
        std::vector<Tokens> refs;
        for (const auto& set : references) refs.push_back(prep(set[i]));
        total += sentence_bleu_stats(prep(hypotheses[i]), refs);
    }
    BleuReport report = bleu_from_stats(total);
    py::dict d;
    d["bleu"] = report.bleu;
    d["precisions"] = std::vector<double>(report.precisions.begin(), report.precisions.end());
    d["brevity_penalty"] = report.brevity_penalty;
    d["hypothesis_length"] = report.stats.hypothesis_length;
    d["reference_length"] = report.stats.reference_length;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Semantic tag grafting, SCFG extraction and decoding";

    py::register_exception<Error>(m, "TreegraftError", PyExc_ValueError);

    m.def("normalize_tree", [](const std::string& text) { return serialize_tree(parse_tree(text)); },
          py::arg("tree"));
    m.def("tree_yield", [](const std::string& text) { return yield_tokens(parse_tree(text)); }, py::arg("tree"));
    m.def("graft_sentence", &graft_text, py::arg("tree"), py::arg("tags"), py::arg("order") = "ne-first");
    m.def("semantic_part", [](const TagTuple& t) { return semantic_part(to_tag(t)); }, py::arg("tag"));
    m.def("parse_standoff", &standoff, py::arg("text"), py::arg("allow_extra_labels") = false);
    m.def("named_entity_labels", &named_entity_labels);
    m.def("modality_labels", &modality_labels);
    m.def("phrase_pairs", &phrase_pairs, py::arg("source_length"), py::arg("target_length"), py::arg("alignment"),
          py::arg("max_length") = 10);
    m.def("samt_label", &label_span, py::arg("tree"), py::arg("start"), py::arg("end"), py::arg("mode") = "samt");
    m.def("extract_rules", &rules_for, py::arg("source"), py::arg("target"), py::arg("alignment"),
          py::arg("tree") = py::none(), py::arg("mode") = "samt", py::arg("max_phrase_length") = 10,
          py::arg("max_source_symbols") = 5, py::arg("max_nonterminals") = 2);
    m.def("score_grammar", &grammar_from_rules, py::arg("rules"));
    m.def("decode", &decode_text, py::arg("grammar"), py::arg("source"), py::arg("k") = 1,
          py::arg("weights") = py::none());
    m.def("bleu", &bleu_report, py::arg("hypotheses"), py::arg("references"), py::arg("lowercase") = true);

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
