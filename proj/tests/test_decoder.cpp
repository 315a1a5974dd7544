#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "treegraft/decoder.hpp"
#include "treegraft/error.hpp"

using namespace treegraft;

namespace {

Grammar grammar_of(const std::vector<std::string>& lines) {
    Grammar g;
    for (const auto& l : lines) g.rules.push_back(parse_rule(l));
    return g;
}

std::string join(const Tokens& t) {
    std::string s;
    for (const auto& w : t) s += (s.empty() ? "" : " ") + w;
    return s;
}

// Scores of every goal derivation, found by expanding every rule over every
// segmentation. Only for grammars without unary rules and short inputs.
std::vector<double> all_goal_scores(const Grammar& g, const WeightVector& w, const Tokens& src) {
    std::set<std::string> vocab;
    std::set<std::string> labels = {"X"};
    for (const auto& r : g.rules) {
        labels.insert(r.lhs);
        for (const auto& s : r.source)
            if (!s.is_nonterminal()) vocab.insert(s.text);
    }
    std::function<std::vector<double>(const std::string&, std::size_t, std::size_t)> derive;
    std::function<std::vector<double>(const ScfgRule&, std::size_t, std::size_t, std::size_t)> fill;
    fill = [&](const ScfgRule& r, std::size_t sym, std::size_t pos, std::size_t j) -> std::vector<double> {
        if (sym == r.source.size()) return pos == j ? std::vector<double>{0.0} : std::vector<double>{};
        const Symbol& s = r.source[sym];
        if (!s.is_nonterminal()) {
            if (pos < j && src[pos] == s.text) return fill(r, sym + 1, pos + 1, j);
            return {};
        }
        std::vector<double> out;
        const std::size_t rest = r.source.size() - sym - 1;  // each later symbol needs a word
        for (std::size_t q = pos + 1; q + rest <= j; ++q)
            for (double a : derive(s.text, pos, q))
                for (double b : fill(r, sym + 1, q, j)) out.push_back(a + b);
        return out;
    };
    derive = [&](const std::string& label, std::size_t i, std::size_t j) {
        std::vector<double> out;
        if (label == "X" && j == i + 1 && !vocab.count(src[i])) out.push_back(w.weight("oov") + w.word_penalty);
        for (const auto& r : g.rules) {
            if (r.lhs != label) continue;
            double own = rule_score(r, w);
            for (const auto& t : r.target)
                if (!t.is_nonterminal()) own += w.word_penalty;
            for (double v : fill(r, 0, i, j)) out.push_back(own + v);
        }
        return out;
    };
    auto any = [&](std::size_t i, std::size_t j) {
        std::vector<double> out;
        for (const auto& l : labels) {
            auto v = derive(l, i, j);
            out.insert(out.end(), v.begin(), v.end());
        }
        return out;
    };
    const double glue = w.weight("glue");
    std::function<std::vector<double>(std::size_t)> goal = [&](std::size_t j) {
        std::vector<double> out;
        for (double x : any(0, j)) out.push_back(glue + x);
        for (std::size_t m = 1; m < j; ++m)
            for (double a : goal(m))
                for (double b : any(m, j)) out.push_back(glue + a + b);
        return out;
    };
    auto scores = goal(src.size());
    std::sort(scores.rbegin(), scores.rend());
    return scores;
}

}  // namespace

TEST_CASE("single rule grammar") {
    Grammar g = grammar_of({"[S] ||| a ||| x |||"});
    DecodeResult r = decode({"a"}, g, WeightVector::uniform(), 1);
    REQUIRE(r.translated());
    CHECK(derivation_to_string(*r.kbest[0]) == Tokens{"x"});
    CHECK(r.kbest[0]->score == doctest::Approx(-1.0));  // one glue rule
}

TEST_CASE("SOV to SVO reordering") {
    Grammar g = grammar_of({
        "[NP] ||| admi ||| man |||",
        "[NP] ||| roti ||| bread |||",
        "[V] ||| khata ||| eats |||",
        "[S] ||| [NP,1] [NP,2] [V,3] ||| [NP,1] [V,3] [NP,2] |||",
    });
    DecodeResult r = decode({"admi", "roti", "khata"}, g, WeightVector::uniform(), 5);
    REQUIRE(r.translated());
    CHECK(derivation_to_string(*r.kbest[0]) == Tokens{"man", "eats", "bread"});
    CHECK(r.kbest[0]->yield == Tokens{"man", "eats", "bread"});
    REQUIRE(r.kbest.size() == 2);
    CHECK(join(r.kbest[1]->yield) == "man bread eats");  // three glue rules
    CHECK(r.kbest[1]->score == doctest::Approx(-3.0));

    const Derivation& top = *r.kbest[0];
    REQUIRE(top.children.size() == 1);
    CHECK(top.children[0]->label == "S");
    CHECK(top.children[0]->children.size() == 3);
}

TEST_CASE("k-best ordering follows probabilities") {
    Grammar g = grammar_of({
        "[X] ||| a ||| x ||| p_tgt_lhs_given_src=0.75",
        "[X] ||| a ||| y ||| p_tgt_lhs_given_src=0.25",
    });
    DecodeResult r = decode({"a"}, g, WeightVector::uniform(), 2);
    REQUIRE(r.kbest.size() == 2);
    CHECK(join(r.kbest[0]->yield) == "x");
    CHECK(join(r.kbest[1]->yield) == "y");
    CHECK(r.kbest[0]->score == doctest::Approx(std::log(0.75) - 1));
    CHECK(r.kbest[1]->score == doctest::Approx(std::log(0.25) - 1));
    CHECK(r.kbest[0]->score >= r.kbest[1]->score);
    CHECK(decode({"a"}, g, WeightVector::uniform(), 1).kbest.size() == 1);
}

TEST_CASE("out-of-vocabulary words pass through") {
    Grammar g = grammar_of({"[X] ||| a ||| x |||"});
    DecodeResult r = decode({"a", "zz"}, g, WeightVector::uniform(), 1);
    REQUIRE(r.translated());
    CHECK(join(r.kbest[0]->yield) == "x zz");
    CHECK(r.kbest[0]->score == doctest::Approx(-1 - 1 - 10));

    ScfgRule oov = Decoder::oov_rule("zz");
    CHECK(format_rule(oov) == "[X] ||| zz ||| zz ||| oov=1");
}

TEST_CASE("untranslatable sentences list the uncovered spans") {
    // "b" is in the vocabulary but only inside a longer rule
    Grammar g = grammar_of({"[X] ||| a ||| x |||", "[X] ||| b c ||| y |||"});
    DecodeResult r = decode({"a", "b", "a"}, g, WeightVector::uniform(), 3);
    CHECK_FALSE(r.translated());
    CHECK(r.uncovered == std::vector<Span>{{1, 2}});

    std::ostringstream out;
    write_kbest(out, 4, r);
    CHECK(out.str() == "4 ||| 0 |||  ||| untranslatable [1,2)\n");
    CHECK(decode({}, g, WeightVector::uniform(), 1).kbest.empty());
}

TEST_CASE("k-best output lines") {
    Grammar g = grammar_of({
        "[X] ||| a ||| x ||| p_tgt_lhs_given_src=0.5",
        "[X] ||| a ||| y ||| p_tgt_lhs_given_src=0.5",
    });
    std::ostringstream out;
    write_kbest(out, 0, decode({"a"}, g, WeightVector::uniform(), 5));
    std::string s = out.str();
    CHECK(s.rfind("0 ||| 1 ||| x ||| ", 0) == 0);  // ties break on the target string
    CHECK(s.find("\n0 ||| 2 ||| y ||| ") != std::string::npos);
}

TEST_CASE("rule and derivation scores") {
    ScfgRule r = parse_rule("[X] ||| a ||| x y ||| p_tgt_lhs_given_src=0.5 count=3 glue=0");
    WeightVector w = WeightVector::uniform();
    CHECK(rule_score(r, w) == doctest::Approx(std::log(0.5)));
    WeightVector zero;
    CHECK(rule_score(r, zero) == 0.0);
    w.weights["count"] = 2;
    CHECK(rule_score(r, w) == doctest::Approx(std::log(0.5) + 6));

    ScfgRule bad = parse_rule("[X] ||| a ||| x ||| p_tgt_lhs_given_src=0");
    CHECK_THROWS_AS(rule_score(bad, w), Error);
    ScfgRule one = parse_rule("[X] ||| a ||| x ||| p_tgt_lhs_given_src=1");
    CHECK(rule_score(one, WeightVector::uniform()) == 0.0);

    Grammar g = grammar_of({"[X] ||| a ||| x ||| p_tgt_lhs_given_src=0.5"});
    DecodeResult d = decode({"a", "a"}, g, WeightVector::uniform(), 1);
    REQUIRE(d.translated());
    CHECK(score_derivation(*d.kbest[0], WeightVector::uniform()) == doctest::Approx(d.kbest[0]->score));
    CHECK(score_derivation(*d.kbest[0], WeightVector{}) == 0.0);
}

TEST_CASE("weights file") {
    std::istringstream in("# tuned\np_tgt_lhs_given_src 0.5\nglue=-2\n\nword_penalty -0.1\n");
    WeightVector w = read_weights(in);
    CHECK(w.weight("p_tgt_lhs_given_src") == 0.5);
    CHECK(w.weight("p_src_given_tgt_lhs") == 1.0);
    CHECK(w.weight("glue") == -2);
    CHECK(w.weight("oov") == -10);
    CHECK(w.weight("never_seen") == 0);
    CHECK(w.word_penalty == -0.1);
    std::istringstream bad("glue\n");
    CHECK_THROWS_AS(read_weights(bad), FormatError);

    Grammar g = grammar_of({"[X] ||| a ||| x y |||"});
    WeightVector wp = WeightVector::uniform();
    wp.word_penalty = -0.5;
    CHECK(decode({"a"}, g, wp, 1).kbest[0]->score == doctest::Approx(-1 - 1.0));
}

TEST_CASE("k-best lists match exhaustive enumeration on random grammars") {
    std::mt19937 rng(11);
    const std::vector<std::string> words = {"a", "b", "c"};
    const std::vector<std::string> labels = {"A", "B"};
    for (int trial = 0; trial < 60; ++trial) {
        Grammar g;
        std::size_t nrules = oracle::pick(rng, 2, 7);
        for (std::size_t i = 0; i < nrules; ++i) {
            ScfgRule r;
            r.lhs = labels[oracle::pick(rng, 0, 1)];
            std::size_t nt = oracle::pick(rng, 0, 2);
            std::size_t terms = oracle::pick(rng, 1, 2);
            std::vector<Symbol> src;
            for (std::size_t t = 0; t < terms; ++t) src.push_back(Symbol::terminal(words[oracle::pick(rng, 0, 2)]));
            std::vector<Symbol> nts;
            for (std::size_t k = 1; k <= nt; ++k) nts.push_back(Symbol::nonterminal(labels[oracle::pick(rng, 0, 1)], static_cast<int>(k)));
            for (const auto& s : nts) src.insert(src.begin() + static_cast<std::ptrdiff_t>(oracle::pick(rng, 0, src.size())), s);
            r.source = src;
            r.target = nts;
            std::shuffle(r.target.begin(), r.target.end(), rng);
            r.target.push_back(Symbol::terminal("t" + std::to_string(i)));
            r.features["p_tgt_lhs_given_src"] = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
            g.rules.push_back(r);
        }
        Tokens src;
        std::size_t n = oracle::pick(rng, 1, 4);
        for (std::size_t i = 0; i < n; ++i) src.push_back(words[oracle::pick(rng, 0, 2)]);

        WeightVector w = WeightVector::uniform();
        auto expected = all_goal_scores(g, w, src);
        DecodeResult r = decode(src, g, w, 50);
        REQUIRE(r.translated() == !expected.empty());
        std::size_t k = std::min<std::size_t>(50, expected.size());
        REQUIRE(r.kbest.size() == k);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(r.kbest[i]->score == doctest::Approx(expected[i]).epsilon(1e-9));
            CHECK(score_derivation(*r.kbest[i], w) == doctest::Approx(r.kbest[i]->score));
            CHECK(derivation_to_string(*r.kbest[i]) == r.kbest[i]->yield);
        }
        if (!expected.empty())
            CHECK(oracle::MaxDerivation(g, w, src).goal() == doctest::Approx(expected.front()).epsilon(1e-9));
    }
}
