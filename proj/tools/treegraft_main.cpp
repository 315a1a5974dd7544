// treegraft: graft semantic tags onto parse trees, extract labeled SCFG
// grammars, decode, and score with BLEU.

#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treegraft/error.hpp"
#include "treegraft/pipeline.hpp"

namespace {

using treegraft::PipelineConfig;

struct CliState {
    PipelineConfig config;
    std::string mode = "samt";
    std::string modes = "hiero,samt,samt+sem";
    std::string graft_order = "ne-first";
    std::string config_file;
};

void add_options(CLI::App* sub, CliState& s) {
    auto& c = s.config;
    sub->add_option("--config", s.config_file, "Flat key=value file; keys are option names without dashes");
    sub->add_option("--trees", c.trees, "Target-side trees, one bracketed tree per line");
    sub->add_option("--tags", c.tags, "Standoff tag file (TSV)");
    sub->add_option("--source", c.source, "Tokenized source sentences");
    sub->add_option("--target", c.target, "Tokenized target sentences");
    sub->add_option("--align", c.align, "Pharaoh alignments, i-j with i a source index");
    sub->add_option("--grammar", c.grammar, "Grammar file (written by extract, read by decode)");
    sub->add_option("--weights", c.weights, "Feature weights, 'name value' per line");
    sub->add_option("--input", c.input, "Sentences to decode");
    sub->add_option("--hypotheses", c.hypotheses, "System output, one sentence per line");
    sub->add_option("--refs", c.refs, "Reference files, parallel to the hypotheses")->delimiter(',');
    sub->add_option("--test-source", c.test_source, "Held-out source for pipeline (default: --source)");
    sub->add_option("--output", c.output, "Output file");
    sub->add_option("--report", c.report, "Graft report path (default: <output>.report.tsv)");
    sub->add_option("--out-dir", c.out_dir, "Pipeline output directory");
    sub->add_option("--mode", s.mode, "Label mode: hiero, samt or samt+sem");
    sub->add_option("--modes", s.modes, "Comma-separated label modes for pipeline");
    sub->add_option("--max-phrase-len", c.max_phrase_len, "Longest initial phrase, either side");
    sub->add_option("--max-source-symbols", c.max_source_symbols, "Longest rule source side, in symbols");
    sub->add_option("--max-nonterminals", c.max_nonterminals, "Nonterminals per rule (0-2)");
    sub->add_flag("--allow-adjacent-nonterminals", c.allow_adjacent_nonterminals,
                  "Permit neighbouring nonterminals on the source side");
    sub->add_option("--graft-order", s.graft_order, "ne-first or modality-first");
    sub->add_option("--k", c.k, "k-best list size");
    sub->add_option("--goal", c.goal, "Goal label for glue rules");
    sub->add_flag("--lowercase,!--no-lowercase", c.lowercase, "Lowercase before BLEU (default on)");
    sub->add_option("--jobs", c.jobs, "Worker threads");
    sub->add_flag("--allow-extra-labels", c.allow_extra_labels, "Accept tag labels outside the inventories");
    sub->add_flag("-v,--verbose", "Per-tag graft diagnostics");
}

// Reads key=value lines and turns each key the user did not pass explicitly
// into "--key=value", so command-line flags always win.
std::vector<std::string> config_arguments(const std::string& path, const std::vector<std::string>& given) {
    std::ifstream in(path);
    if (!in) throw treegraft::Error("cannot open config file '" + path + "'");
    std::set<std::string> explicit_keys;
    for (const auto& a : given) {
        if (a.rfind("--", 0) != 0) continue;
        explicit_keys.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
    }
    std::vector<std::string> out;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw treegraft::FormatError("expected key=value in config", lineno);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "config") throw treegraft::FormatError("config files cannot include other configs", lineno);
        if (explicit_keys.count(key)) continue;
        out.push_back("--" + key + "=" + value);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graft semantic tags onto parse trees, extract labeled SCFG grammars, decode, and score"};
    app.require_subcommand(1);
    CliState state;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"graft", "Graft standoff tags onto a tree file"},
        {"extract", "Extract and score a grammar from an aligned corpus"},
        {"decode", "Translate sentences with a grammar"},
        {"bleu", "Corpus BLEU against one or more reference files"},
        {"stats", "Line, token and type counts"},
        {"pipeline", "graft, extract, decode and bleu for several label modes"},
    };
    for (const auto& [name, help] : commands) add_options(app.add_subcommand(name, help), state);

    // Splice config-file values in front of the user's own arguments.
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    try {
        if (!config_path.empty() && !args.empty()) {
            auto extra = config_arguments(config_path, args);
            args.insert(args.begin() + 1, extra.begin(), extra.end());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        auto& c = state.config;
        c.mode = treegraft::parse_mode(state.mode);
        c.modes.clear();
        std::string rest = state.modes;
        while (!rest.empty()) {
            auto comma = rest.find(',');
            c.modes.push_back(treegraft::parse_mode(rest.substr(0, comma)));
            rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
        }
        if (state.graft_order == "ne-first") {
            c.graft_order = treegraft::GraftOrder::NamedEntitiesFirst;
        } else if (state.graft_order == "modality-first") {
            c.graft_order = treegraft::GraftOrder::ModalitiesFirst;
        } else {
            throw treegraft::Error("--graft-order must be ne-first or modality-first");
        }

        const CLI::App* chosen = app.get_subcommands().front();
        c.verbose = static_cast<int>(chosen->count("--verbose"));
        const std::string sub = chosen->get_name();
        if (sub == "graft") treegraft::run_graft(c, std::cerr);
        else if (sub == "extract") treegraft::run_extract(c, std::cerr);
        else if (sub == "decode") treegraft::run_decode(c, std::cerr);
        else if (sub == "bleu") treegraft::run_bleu(c, std::cout);
        else if (sub == "stats") treegraft::run_stats(c, std::cout);
        else treegraft::run_pipeline(c, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
