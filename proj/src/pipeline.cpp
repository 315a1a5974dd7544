#include "treegraft/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "numfmt.hpp"
#include "treegraft/corpus.hpp"
#include "treegraft/decoder.hpp"
#include "treegraft/error.hpp"
#include "treegraft/evalkit.hpp"
#include "treegraft/grafting.hpp"
#include "treegraft/parallel.hpp"

namespace treegraft {

namespace fs = std::filesystem;
using Counts = std::map<std::string, double>;

std::string_view mode_name(PipelineMode mode) {
    switch (mode) {
        case PipelineMode::Hiero: return "hiero";
        case PipelineMode::Samt: return "samt";
        case PipelineMode::SamtSem: return "samt+sem";
    }
    return "samt";
}

PipelineMode parse_mode(std::string_view name) {
    if (name == "hiero") return PipelineMode::Hiero;
    if (name == "samt") return PipelineMode::Samt;
    if (name == "samt+sem") return PipelineMode::SamtSem;
    throw Error("unknown mode '" + std::string(name) + "' (expected hiero, samt or samt+sem)");
}

ExtractionConfig PipelineConfig::extraction() const {
    ExtractionConfig c;
    c.max_phrase_length = max_phrase_len;
    c.max_source_symbols = max_source_symbols;
    c.max_nonterminals = max_nonterminals;
    c.forbid_adjacent_source_nonterminals = !allow_adjacent_nonterminals;
    c.mode = mode == PipelineMode::Hiero ? LabelMode::Hiero : LabelMode::Samt;
    return c;
}

namespace {

void require(const std::string& value, const char* flag, std::string_view subcommand) {
    if (value.empty()) throw Error(std::string(subcommand) + " needs " + flag);
}

void require_file(const std::string& path) {
    if (!path.empty() && !fs::is_regular_file(path)) throw Error("input file '" + path + "' does not exist");
}

}  // namespace

void PipelineConfig::validate(std::string_view sub) const {
    if (max_phrase_len == 0 || max_source_symbols == 0) throw Error("extraction limits must be positive");
    if (max_nonterminals > 2) throw Error("--max-nonterminals must be 0, 1 or 2");
    if (k == 0) throw Error("--k must be positive");
    if (jobs == 0) throw Error("--jobs must be positive");

    if (sub == "graft") {
        require(trees, "--trees", sub);
        require(tags, "--tags", sub);
        require(output, "--output", sub);
    } else if (sub == "extract") {
        require(source, "--source", sub);
        require(target, "--target", sub);
        require(align, "--align", sub);
        require(grammar, "--grammar", sub);
        if (mode != PipelineMode::Hiero) require(trees, "--trees", sub);
        if (mode == PipelineMode::SamtSem && tags.empty()) throw Error("mode samt+sem requires --tags");
    } else if (sub == "decode") {
        require(grammar, "--grammar", sub);
        require(input, "--input", sub);
        require(output, "--output", sub);
    } else if (sub == "bleu") {
        require(hypotheses, "--hypotheses", sub);
        if (refs.empty()) throw Error("bleu needs at least one --refs file");
    } else if (sub == "stats") {
        require(source, "--source", sub);
        require(target, "--target", sub);
    } else if (sub == "pipeline") {
        require(source, "--source", sub);
        require(target, "--target", sub);
        require(align, "--align", sub);
        require(trees, "--trees", sub);
        require(out_dir, "--out-dir", sub);
        for (auto m : modes) {
            if (m == PipelineMode::SamtSem && tags.empty()) throw Error("mode samt+sem requires --tags");
        }
        if (!test_source.empty() && refs.empty()) throw Error("--test-source needs --refs");
    } else {
        throw Error("unknown subcommand '" + std::string(sub) + "'");
    }
    for (const auto* p : {&trees, &tags, &source, &target, &align, &weights, &input, &hypotheses, &test_source}) {
        require_file(*p);
    }
    for (const auto& r : refs) require_file(r);
    if (sub == "decode") require_file(grammar);
}

std::map<std::string, std::string> PipelineConfig::echo() const {
    std::map<std::string, std::string> e{
        {"trees", trees},
        {"tags", tags},
        {"source", source},
        {"target", target},
        {"align", align},
        {"grammar", grammar},
        {"weights", weights},
        {"input", input},
        {"hypotheses", hypotheses},
        {"test-source", test_source},
        {"output", output},
        {"report", report},
        {"out-dir", out_dir},
        {"mode", std::string(mode_name(mode))},
        {"max-phrase-len", std::to_string(max_phrase_len)},
        {"max-source-symbols", std::to_string(max_source_symbols)},
        {"max-nonterminals", std::to_string(max_nonterminals)},
        {"allow-adjacent-nonterminals", allow_adjacent_nonterminals ? "true" : "false"},
        {"graft-order", graft_order == GraftOrder::NamedEntitiesFirst ? "ne-first" : "modality-first"},
        {"k", std::to_string(k)},
        {"goal", goal},
        {"lowercase", lowercase ? "true" : "false"},
        {"jobs", std::to_string(jobs)},
        {"allow-extra-labels", allow_extra_labels ? "true" : "false"},
    };
    std::string r;
    for (const auto& f : refs) r += (r.empty() ? "" : ",") + f;
    e["refs"] = r;
    std::string ms;
    for (auto m : modes) ms += (ms.empty() ? "" : ",") + std::string(mode_name(m));
    e["modes"] = ms;
    return e;
}

namespace {

std::ofstream open_output(const std::string& path) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return in;
}

std::vector<std::string> read_lines(const std::string& path) {
    auto in = open_input(path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

std::string utc_timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_manifest(const std::string& artifact, std::string_view subcommand, const PipelineConfig& config,
                    const Counts& counts) {
    nlohmann::ordered_json j;
    j["tool"] = "treegraft";
    j["version"] = std::string(kVersion);
    j["subcommand"] = std::string(subcommand);
    j["artifact"] = fs::path(artifact).filename().string();
    j["created"] = utc_timestamp();
    j["config"] = config.echo();
    j["counts"] = counts;
    auto out = open_output(artifact + ".manifest.json");
    out << j.dump(2) << '\n';
}

TagsBySentence load_tags(const PipelineConfig& config) {
    if (config.tags.empty()) return {};
    auto in = open_input(config.tags);
    StandoffOptions opts;
    opts.allow_extra_labels = config.allow_extra_labels;
    return parse_standoff(in, opts);
}

struct ExtractionResult {
    Grammar grammar;
    Counts counts;
};

ExtractionResult extract_grammar(const PipelineConfig& config, std::ostream& log) {
    const bool semantic = config.mode == PipelineMode::SamtSem;
    TagsBySentence tags = semantic ? load_tags(config) : TagsBySentence{};
    BitextReader reader({config.source, config.target, config.align, config.trees});
    if (!tags.empty() && tags.rbegin()->first >= reader.lines()) {
        throw Error("tag file indexes " + std::to_string(tags.rbegin()->first + 1) + " sentences but corpus has " +
                    std::to_string(reader.lines()));
    }
    const ExtractionConfig ec = config.extraction();

    GrammarScorer scorer;
    GraftReport graft_report;
    std::size_t pairs = 0;
    constexpr std::size_t kBatch = 256;
    while (true) {
        std::vector<SentencePair> batch;
        while (batch.size() < kBatch) {
            auto p = reader.next();
            if (!p) break;
            batch.push_back(std::move(*p));
        }
        if (batch.empty()) break;
        std::vector<std::vector<ScfgRule>> instances(batch.size());
        std::vector<GraftReport> reports(batch.size());
        parallel_for(batch.size(), config.jobs, [&](std::size_t i) {
            SentencePair& pair = batch[i];
            if (semantic) {
                auto it = tags.find(pair.id);
                if (it != tags.end()) {
                    auto [tree, report] = graft_sentence(std::move(*pair.target_tree), it->second, config.graft_order);
                    pair.target_tree = std::move(tree);
                    reports[i] = std::move(report);
                }
            }
            instances[i] = extract_rules(pair, ec);
        });
        for (std::size_t i = 0; i < batch.size(); ++i) {
            scorer.add(instances[i]);
            graft_report += reports[i];
        }
        pairs += batch.size();
    }
    for (const auto& s : reader.skipped()) log << "warning: sentence " << s.id << " skipped: " << s.reason << '\n';

    ExtractionResult r;
    r.grammar = scorer.finish();
    r.grammar.metadata = {
        {"mode", std::string(mode_name(config.mode))},
        {"max-phrase-len", std::to_string(ec.max_phrase_length)},
        {"max-source-symbols", std::to_string(ec.max_source_symbols)},
        {"max-nonterminals", std::to_string(ec.max_nonterminals)},
        {"allow-adjacent-nonterminals", ec.forbid_adjacent_source_nonterminals ? "false" : "true"},
        {"sentences", std::to_string(pairs)},
        {"skipped", std::to_string(reader.skipped().size())},
        {"instances", std::to_string(scorer.instances())},
    };
    r.counts = {{"sentences", static_cast<double>(pairs)},
                {"skipped", static_cast<double>(reader.skipped().size())},
                {"instances", static_cast<double>(scorer.instances())},
                {"rules", static_cast<double>(r.grammar.rules.size())}};
    if (semantic) r.counts["grafted_tags"] = static_cast<double>(graft_report.total_tags() - graft_report.rejected);
    return r;
}

WeightVector load_weights(const PipelineConfig& config) {
    if (config.weights.empty()) return WeightVector::uniform();
    auto in = open_input(config.weights);
    return read_weights(in);
}

struct DecodeSummary {
    std::vector<std::string> best;  // 1-best strings, empty when untranslatable
    Counts counts;
};

DecodeSummary decode_file(const Grammar& grammar, const PipelineConfig& config, const std::string& input,
                          const std::string& kbest_path) {
    Decoder decoder(grammar, load_weights(config), DecoderOptions{config.k, config.goal});
    auto lines = read_lines(input);
    std::vector<DecodeResult> results(lines.size());
    parallel_for(lines.size(), config.jobs, [&](std::size_t i) { results[i] = decoder.decode(split_tokens(lines[i])); });

    DecodeSummary s;
    auto out = open_output(kbest_path);
    std::size_t failed = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        write_kbest(out, i, results[i]);
        std::string best;
        if (results[i].translated()) {
            for (const auto& w : results[i].kbest.front()->yield) best += (best.empty() ? "" : " ") + w;
        } else {
            ++failed;
        }
        s.best.push_back(std::move(best));
    }
    s.counts = {{"sentences", static_cast<double>(lines.size())}, {"untranslatable", static_cast<double>(failed)}};
    return s;
}

BleuReport score_files(const std::vector<std::string>& hypotheses, const std::vector<std::string>& ref_paths,
                       bool lowercase) {
    std::vector<std::vector<std::string>> refs(hypotheses.size());
    for (const auto& path : ref_paths) {
        auto lines = read_lines(path);
        if (lines.size() != hypotheses.size()) {
            throw Error("reference file '" + path + "' has " + std::to_string(lines.size()) + " lines, expected " +
                        std::to_string(hypotheses.size()));
        }
        for (std::size_t i = 0; i < lines.size(); ++i) refs[i].push_back(std::move(lines[i]));
    }
    return bleu(hypotheses, refs, lowercase);
}

Counts bleu_counts(const BleuReport& r) {
    return {{"bleu", r.bleu},
            {"brevity_penalty", r.brevity_penalty},
            {"hypothesis_length", static_cast<double>(r.stats.hypothesis_length)},
            {"reference_length", static_cast<double>(r.stats.reference_length)}};
}

std::string stats_row(const std::string& name, const CorpusStats& s) {
    return name + "\t" + std::to_string(s.lines) + "\t" + std::to_string(s.source_tokens) + "\t" +
           std::to_string(s.source_types) + "\t" + std::to_string(s.target_tokens) + "\t" +
           std::to_string(s.target_types) + "\n";
}

CorpusStats file_stats(const std::string& source, const std::string& target) {
    auto src = read_lines(source);
    auto tgt = read_lines(target);
    if (src.size() != tgt.size()) {
        throw Error("line count mismatch: source " + std::to_string(src.size()) + ", target " +
                    std::to_string(tgt.size()));
    }
    StatsAccumulator acc;
    for (std::size_t i = 0; i < src.size(); ++i) acc.add(split_tokens(src[i]), split_tokens(tgt[i]));
    return acc.stats();
}

}  // namespace

Counts run_graft(const PipelineConfig& config, std::ostream& log) {
    config.validate("graft");
    TagsBySentence tags = load_tags(config);
    auto trees = open_input(config.trees);
    GraftReport report;
    {
        auto out = open_output(config.output);
        GraftCorpusOptions opts;
        opts.order = config.graft_order;
        opts.jobs = config.jobs;
        opts.warnings = &log;
        report = graft_corpus(trees, tags, out, opts);
    }
    const std::string report_path = config.report.empty() ? config.output + ".report.tsv" : config.report;
    {
        auto out = open_output(report_path);
        write_report_tsv(report, out);
    }
    if (config.verbose > 0) {
        for (const auto& d : report.diagnostics) {
            log << d.sentence_id << '\t' << format_standoff(d.tag) << '\t'
                << (d.graft_case ? graft_case_name(*d.graft_case) : "Rejected");
            if (!d.message.empty()) log << '\t' << d.message;
            log << '\n';
        }
    }
    Counts counts;
    for (std::size_t i = 0; i < kGraftCaseCount; ++i) {
        counts[graft_case_name(static_cast<GraftCase>(i))] = static_cast<double>(report.counts[i]);
    }
    counts["Rejected"] = static_cast<double>(report.rejected);
    counts["tags"] = static_cast<double>(report.total_tags());
    write_manifest(config.output, "graft", config, counts);
    write_manifest(report_path, "graft", config, counts);
    return counts;
}

Counts run_extract(const PipelineConfig& config, std::ostream& log) {
    config.validate("extract");
    auto result = extract_grammar(config, log);
    {
        auto out = open_output(config.grammar);
        write_grammar(result.grammar, out);
    }
    write_manifest(config.grammar, "extract", config, result.counts);
    return result.counts;
}

Counts run_decode(const PipelineConfig& config, std::ostream& log) {
    config.validate("decode");
    auto in = open_input(config.grammar);
    Grammar grammar = read_grammar(in);
    auto summary = decode_file(grammar, config, config.input, config.output);
    if (summary.counts["untranslatable"] > 0) {
        log << "warning: " << summary.counts["untranslatable"] << " sentence(s) untranslatable\n";
    }
    write_manifest(config.output, "decode", config, summary.counts);
    return summary.counts;
}

Counts run_bleu(const PipelineConfig& config, std::ostream& log) {
    config.validate("bleu");
    auto report = score_files(read_lines(config.hypotheses), config.refs, config.lowercase);
    const std::string text = format_bleu_report(report, config.lowercase);
    if (config.output.empty()) {
        log << text;
    } else {
        auto out = open_output(config.output);
        out << text;
    }
    auto counts = bleu_counts(report);
    if (!config.output.empty()) write_manifest(config.output, "bleu", config, counts);
    return counts;
}

Counts run_stats(const PipelineConfig& config, std::ostream& out) {
    config.validate("stats");
    std::string text = "set\tlines\tsource_tokens\tsource_types\ttarget_tokens\ttarget_types\n";
    CorpusStats train = file_stats(config.source, config.target);
    text += stats_row("train", train);
    if (!config.test_source.empty() && !config.refs.empty()) {
        text += stats_row("test", file_stats(config.test_source, config.refs.front()));
    }
    if (config.output.empty()) {
        out << text;
    } else {
        auto f = open_output(config.output);
        f << text;
    }
    Counts counts{{"lines", static_cast<double>(train.lines)},
                  {"source_tokens", static_cast<double>(train.source_tokens)},
                  {"source_types", static_cast<double>(train.source_types)},
                  {"target_tokens", static_cast<double>(train.target_tokens)},
                  {"target_types", static_cast<double>(train.target_types)}};
    if (!config.output.empty()) write_manifest(config.output, "stats", config, counts);
    return counts;
}

Counts run_pipeline(const PipelineConfig& config, std::ostream& log) {
    config.validate("pipeline");
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    Counts totals;

    PipelineConfig stats = config;
    stats.output = (dir / "stats.tsv").string();
    run_stats(stats, log);

    if (!config.tags.empty()) {
        PipelineConfig graft = config;
        graft.output = (dir / "grafted.trees").string();
        graft.report = (dir / "graft.report.tsv").string();
        auto c = run_graft(graft, log);
        totals["grafted_tags"] = c["tags"] - c["Rejected"] - c["CrossingSkipped"] - c["NoNodeSkipped"];
    }

    const std::string test_source = config.test_source.empty() ? config.source : config.test_source;
    const std::vector<std::string> refs = config.test_source.empty() ? std::vector<std::string>{config.target} : config.refs;

    std::string summary = "mode\trules\tuntranslatable\tbleu\n";
    for (PipelineMode mode : config.modes) {
        PipelineConfig mc = config;
        mc.mode = mode;
        std::string name(mode_name(mode));
        std::string dirname = name;
        for (char& c : dirname)
            if (c == '+') c = '-';
        const fs::path mdir = dir / dirname;
        mc.grammar = (mdir / "grammar.txt").string();
        log << "[" << name << "] extracting\n";
        auto extracted = run_extract(mc, log);

        log << "[" << name << "] decoding " << test_source << '\n';
        auto in = open_input(mc.grammar);
        Grammar grammar = read_grammar(in);
        mc.input = test_source;
        mc.output = (mdir / "decode.kbest").string();
        auto decoded = decode_file(grammar, mc, test_source, mc.output);
        write_manifest(mc.output, "pipeline", mc, decoded.counts);
        {
            auto out = open_output((mdir / "hyp.txt").string());
            for (const auto& h : decoded.best) out << h << '\n';
        }

        auto report = score_files(decoded.best, refs, config.lowercase);
        const std::string bleu_path = (mdir / "bleu.txt").string();
        {
            auto out = open_output(bleu_path);
            out << format_bleu_report(report, config.lowercase);
        }
        write_manifest(bleu_path, "pipeline", mc, bleu_counts(report));

        summary += name + "\t" + std::to_string(static_cast<std::size_t>(extracted["rules"])) + "\t" +
                   std::to_string(static_cast<std::size_t>(decoded.counts["untranslatable"])) + "\t" +
                   detail::format_double(report.bleu) + "\n";
        totals["bleu." + name] = report.bleu;
        totals["rules." + name] = extracted["rules"];
        log << "[" << name << "] bleu " << detail::format_double(report.bleu) << '\n';
    }
    const std::string summary_path = (dir / "summary.tsv").string();
    {
        auto out = open_output(summary_path);
        out << summary;
    }
    write_manifest(summary_path, "pipeline", config, totals);
    return totals;
}

}  // namespace treegraft
