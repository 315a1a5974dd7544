#pragma once

// Corpus-level BLEU (n = 1..4) with multiple references.
//
// Brevity penalty uses the closest reference length, ties going to the
// shorter reference. No smoothing: any zero n-gram precision makes BLEU 0.
// Lowercasing folds ASCII letters only.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "treegraft/corpus.hpp"

namespace treegraft {

inline constexpr std::size_t kBleuOrder = 4;

// Sufficient statistics; sums of per-sentence stats give corpus stats.
struct BleuStats {
    std::array<std::size_t, kBleuOrder> matches{};
    std::array<std::size_t, kBleuOrder> totals{};
    std::size_t hypothesis_length = 0;
    std::size_t reference_length = 0;

    BleuStats& operator+=(const BleuStats& other);
};

struct BleuReport {
    double bleu = 0.0;
    std::array<double, kBleuOrder> precisions{};
    double brevity_penalty = 0.0;
    BleuStats stats;
};

std::string lowercase_ascii(std::string text);

BleuStats sentence_bleu_stats(const Tokens& hypothesis, const std::vector<Tokens>& references);

BleuReport bleu_from_stats(const BleuStats& stats);

// One reference list per hypothesis, each with at least one reference. Throws
// Error on an empty corpus or mismatched counts.
BleuReport bleu(const std::vector<std::string>& hypotheses, const std::vector<std::vector<std::string>>& references,
                bool lowercase = true);

// Plain-text report: bleu, precisions, brevity penalty, lengths, and the
// conventions used.
std::string format_bleu_report(const BleuReport& report, bool lowercase);

}  // namespace treegraft
