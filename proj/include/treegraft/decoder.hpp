#pragma once

// CKY decoding of a source sentence under a synchronous grammar, producing
// k-best target derivations scored log-linearly over rule features.
//
// There is no language model. A derivation's score is the sum over its rules
// of sum_f weight(f) * phi(f), plus word_penalty per output word, where
// phi(f) = log(value) for probability features (names starting "p_") and the
// raw value otherwise.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "treegraft/corpus.hpp"
#include "treegraft/extraction.hpp"
#include "treegraft/treebank.hpp"

namespace treegraft {

// Feature names carried by decoder-synthesized rules.
namespace feature {
inline constexpr std::string_view kGlue = "glue";
inline constexpr std::string_view kOov = "oov";
}  // namespace feature

struct WeightVector {
    std::map<std::string, double> weights;
    double word_penalty = 0.0;

    double weight(std::string_view name) const;  // 0 for unknown features

    // Weight 1 on both translation probabilities, glue penalty 1, OOV
    // penalty 10, no word penalty.
    static WeightVector uniform();
};

// Lines "name value" or "name=value"; "word_penalty" sets the word penalty.
// Unlisted features keep their uniform() value. Throws FormatError.
WeightVector read_weights(std::istream& in);

bool is_probability_feature(std::string_view name);

// Weighted feature score of one rule, without the word penalty. Throws Error
// if a probability feature is zero or negative.
double rule_score(const ScfgRule& rule, const WeightVector& weights);

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

struct Derivation {
    std::shared_ptr<const ScfgRule> rule;
    std::vector<DerivationPtr> children;  // children[k-1] fills nonterminal k
    Span span;
    std::string label;
    double score = 0.0;
    Tokens yield;  // cached target string
};

// Target words by recursive substitution in co-index order.
Tokens derivation_to_string(const Derivation& d);

// Recomputes a derivation's score from its rules under `weights`.
double score_derivation(const Derivation& d, const WeightVector& weights);

struct DecoderOptions {
    std::size_t k = 1;
    std::string goal = "GOAL";
};

struct DecodeResult {
    std::vector<DerivationPtr> kbest;  // best first
    std::vector<Span> uncovered;       // set only when kbest is empty

    bool translated() const { return !kbest.empty(); }
};

class Decoder {
public:
    Decoder(const Grammar& grammar, WeightVector weights, DecoderOptions options = {});

    DecodeResult decode(const Tokens& source) const;

    const WeightVector& weights() const { return weights_; }
    const DecoderOptions& options() const { return options_; }

    // [GOAL] -> [X,1] and [GOAL] -> [GOAL,1] [X,2]; the X slot accepts any label.
    const std::shared_ptr<const ScfgRule>& glue_start() const { return glue_start_; }
    const std::shared_ptr<const ScfgRule>& glue_concat() const { return glue_concat_; }

    // [X] -> w / w for words the grammar never mentions.
    static ScfgRule oov_rule(const std::string& word);

private:
    struct CompiledRule {
        std::shared_ptr<const ScfgRule> rule;
        double score = 0.0;  // features plus word penalty
        std::size_t terminals = 0;
    };

    std::vector<CompiledRule> rules_;
    std::vector<std::size_t> nonterminal_only_;  // rules without source terminals
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_terminal_;  // keyed by first source terminal
    std::unordered_set<std::string> vocabulary_;
    WeightVector weights_;
    DecoderOptions options_;
    std::shared_ptr<const ScfgRule> glue_start_, glue_concat_;
    double glue_score_ = 0.0;
    double oov_feature_score_ = 0.0;
};

DecodeResult decode(const Tokens& source, const Grammar& grammar, const WeightVector& weights, std::size_t k,
                    const std::string& goal = "GOAL");

// "sent_id ||| rank ||| target ||| score" per entry, rank starting at 1. An
// untranslatable sentence yields one line with rank 0, an empty target and
// "untranslatable" plus the uncovered spans in the score field.
void write_kbest(std::ostream& out, std::size_t sentence_id, const DecodeResult& result);

}  // namespace treegraft
