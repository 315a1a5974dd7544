#pragma once

// Subcommand implementations behind the `treegraft` executable. Each run_*
// writes its artifacts plus a "<artifact>.manifest.json" beside each one.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "treegraft/extraction.hpp"
#include "treegraft/semtags.hpp"

namespace treegraft {

inline constexpr std::string_view kVersion = "0.1.0";

enum class PipelineMode { Hiero, Samt, SamtSem };

std::string_view mode_name(PipelineMode mode);  // "hiero", "samt", "samt+sem"
PipelineMode parse_mode(std::string_view name);  // throws Error

struct PipelineConfig {
    // inputs
    std::string trees;
    std::string tags;
    std::string source;
    std::string target;
    std::string align;
    std::string grammar;
    std::string weights;
    std::string input;               // decode: one tokenized sentence per line
    std::string hypotheses;          // bleu
    std::vector<std::string> refs;   // bleu / pipeline: parallel reference files
    std::string test_source;         // pipeline: held-out source; defaults to --source
    // outputs
    std::string output;
    std::string report;
    std::string out_dir;

    PipelineMode mode = PipelineMode::Samt;
    std::vector<PipelineMode> modes = {PipelineMode::Hiero, PipelineMode::Samt, PipelineMode::SamtSem};
    std::size_t max_phrase_len = 10;
    std::size_t max_source_symbols = 5;
    std::size_t max_nonterminals = 2;
    bool allow_adjacent_nonterminals = false;
    GraftOrder graft_order = GraftOrder::NamedEntitiesFirst;
    std::size_t k = 1;
    std::string goal = "GOAL";
    bool lowercase = true;
    unsigned jobs = 1;
    bool allow_extra_labels = false;
    int verbose = 0;

    ExtractionConfig extraction() const;

    // Throws Error naming the first missing input or contradiction.
    void validate(std::string_view subcommand) const;

    // Flat key/value echo for manifests.
    std::map<std::string, std::string> echo() const;
};

// Each returns its counts, also recorded in the manifest.
std::map<std::string, double> run_graft(const PipelineConfig& config, std::ostream& log);
std::map<std::string, double> run_extract(const PipelineConfig& config, std::ostream& log);
std::map<std::string, double> run_decode(const PipelineConfig& config, std::ostream& log);
std::map<std::string, double> run_bleu(const PipelineConfig& config, std::ostream& log);
std::map<std::string, double> run_stats(const PipelineConfig& config, std::ostream& out);
std::map<std::string, double> run_pipeline(const PipelineConfig& config, std::ostream& log);

}  // namespace treegraft
