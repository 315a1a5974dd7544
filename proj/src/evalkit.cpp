#include "treegraft/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "numfmt.hpp"
#include "treegraft/error.hpp"

namespace treegraft {

BleuStats& BleuStats::operator+=(const BleuStats& other) {
    for (std::size_t n = 0; n < kBleuOrder; ++n) {
        matches[n] += other.matches[n];
        totals[n] += other.totals[n];
    }
    hypothesis_length += other.hypothesis_length;
    reference_length += other.reference_length;
    return *this;
}

std::string lowercase_ascii(std::string text) {
    for (char& c : text)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return text;
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const Tokens& tokens, std::size_t order) {
    NgramCounts out;
    if (tokens.size() < order) return out;
    for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
        ++out[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                       tokens.begin() + static_cast<std::ptrdiff_t>(i + order))];
    }
    return out;
}

}  // namespace

BleuStats sentence_bleu_stats(const Tokens& hypothesis, const std::vector<Tokens>& references) {
    if (references.empty()) throw Error("hypothesis has no references");
    BleuStats s;
    s.hypothesis_length = hypothesis.size();

    std::size_t best = references.front().size();
    for (const auto& ref : references) {
        std::size_t d = static_cast<std::size_t>(std::abs(static_cast<long>(ref.size()) - static_cast<long>(hypothesis.size())));
        std::size_t bd = static_cast<std::size_t>(std::abs(static_cast<long>(best) - static_cast<long>(hypothesis.size())));
        if (d < bd || (d == bd && ref.size() < best)) best = ref.size();
    }
    s.reference_length = best;

    for (std::size_t n = 1; n <= kBleuOrder; ++n) {
        NgramCounts hyp = ngrams(hypothesis, n);
        NgramCounts max_ref;
        for (const auto& ref : references) {
            for (const auto& [gram, c] : ngrams(ref, n)) {
                auto& m = max_ref[gram];
                m = std::max(m, c);
            }
        }
        for (const auto& [gram, c] : hyp) {
            s.totals[n - 1] += c;
            auto it = max_ref.find(gram);
            if (it != max_ref.end()) s.matches[n - 1] += std::min(c, it->second);
        }
    }
    return s;
}

BleuReport bleu_from_stats(const BleuStats& stats) {
    BleuReport r;
    r.stats = stats;
    double log_sum = 0.0;
    bool zero = false;
    for (std::size_t n = 0; n < kBleuOrder; ++n) {
        r.precisions[n] = stats.totals[n] ? static_cast<double>(stats.matches[n]) / static_cast<double>(stats.totals[n]) : 0.0;
        if (r.precisions[n] == 0.0) {
            zero = true;
        } else {
            log_sum += std::log(r.precisions[n]);
        }
    }
    if (stats.hypothesis_length == 0) {
        r.brevity_penalty = 0.0;
    } else if (stats.hypothesis_length >= stats.reference_length) {
        r.brevity_penalty = 1.0;
    } else {
        r.brevity_penalty = std::exp(1.0 - static_cast<double>(stats.reference_length) /
                                               static_cast<double>(stats.hypothesis_length));
    }
    r.bleu = zero ? 0.0 : r.brevity_penalty * std::exp(log_sum / static_cast<double>(kBleuOrder));
    // exp(log p) can land a hair above 1 for a perfect match.
    r.bleu = std::min(r.bleu, 1.0);
    return r;
}

BleuReport bleu(const std::vector<std::string>& hypotheses, const std::vector<std::vector<std::string>>& references,
                bool lowercase) {
    if (hypotheses.empty()) throw Error("empty corpus");
    if (hypotheses.size() != references.size()) {
        throw Error("hypothesis count " + std::to_string(hypotheses.size()) + " does not match reference count " +
                    std::to_string(references.size()));
    }
    auto prep = [lowercase](const std::string& line) { return split_tokens(lowercase ? lowercase_ascii(line) : line); };
    BleuStats total;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        std::vector<Tokens> refs;
        for (const auto& r : references[i]) refs.push_back(prep(r));
        total += sentence_bleu_stats(prep(hypotheses[i]), refs);
    }
    return bleu_from_stats(total);
}

std::string format_bleu_report(const BleuReport& report, bool lowercase) {
    using detail::format_double;
    std::string out;
    out += "bleu\t" + format_double(report.bleu) + "\n";
    for (std::size_t n = 0; n < kBleuOrder; ++n) {
        out += "precision_" + std::to_string(n + 1) + "\t" + format_double(report.precisions[n]) + "\t" +
               std::to_string(report.stats.matches[n]) + "/" + std::to_string(report.stats.totals[n]) + "\n";
    }
    out += "brevity_penalty\t" + format_double(report.brevity_penalty) + "\n";
    out += "hypothesis_length\t" + std::to_string(report.stats.hypothesis_length) + "\n";
    out += "reference_length\t" + std::to_string(report.stats.reference_length) + "\n";
    out += std::string("lowercase\t") + (lowercase ? "true" : "false") + "\n";
    out += "reference_length_rule\tclosest, ties to shorter\n";
    out += "smoothing\tnone\n";
    return out;
}

}  // namespace treegraft
