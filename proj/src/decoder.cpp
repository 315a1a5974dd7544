#include "treegraft/decoder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <set>

#include "numfmt.hpp"
#include "treegraft/error.hpp"

namespace treegraft {

double WeightVector::weight(std::string_view name) const {
    auto it = weights.find(std::string(name));
    return it == weights.end() ? 0.0 : it->second;
}

WeightVector WeightVector::uniform() {
    WeightVector w;
    w.weights[std::string(feature::kTargetGivenSource)] = 1.0;
    w.weights[std::string(feature::kSourceGivenTarget)] = 1.0;
    w.weights[std::string(feature::kGlue)] = -1.0;
    w.weights[std::string(feature::kOov)] = -10.0;
    return w;
}

WeightVector read_weights(std::istream& in) {
    WeightVector w = WeightVector::uniform();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        for (char& c : line)
            if (c == '=') c = ' ';
        auto fields = split_tokens(line);
        if (fields.empty() || fields.front().front() == '#') continue;
        if (fields.size() != 2) throw FormatError("expected 'name value'", lineno);
        double value = 0;
        const auto& v = fields[1];
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
        if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(value)) {
            throw FormatError("bad weight '" + v + "'", lineno);
        }
        if (fields[0] == "word_penalty") {
            w.word_penalty = value;
        } else {
            w.weights[fields[0]] = value;
        }
    }
    return w;
}

bool is_probability_feature(std::string_view name) { return name.substr(0, 2) == "p_"; }

double rule_score(const ScfgRule& rule, const WeightVector& weights) {
    double score = 0.0;
    for (const auto& [name, value] : rule.features) {
        double phi = value;
        if (is_probability_feature(name)) {
            if (!(value > 0.0)) {
                throw Error("probability feature " + name + "=" + detail::format_double(value) + " in rule " +
                            format_rule(rule) + " is not positive");
            }
            phi = std::log(value);
        }
        score += weights.weight(name) * phi;
    }
    return score;
}

Tokens derivation_to_string(const Derivation& d) {
    Tokens out;
    for (const auto& sym : d.rule->target) {
        if (sym.is_nonterminal()) {
            auto part = derivation_to_string(*d.children.at(static_cast<std::size_t>(sym.index - 1)));
            out.insert(out.end(), part.begin(), part.end());
        } else {
            out.push_back(sym.text);
        }
    }
    return out;
}

double score_derivation(const Derivation& d, const WeightVector& weights) {
    double score = rule_score(*d.rule, weights);
    for (const auto& sym : d.rule->target)
        if (!sym.is_nonterminal()) score += weights.word_penalty;
    for (const auto& c : d.children) score += score_derivation(*c, weights);
    return score;
}

namespace {

std::shared_ptr<const ScfgRule> make_glue(const std::string& goal, bool concat) {
    auto r = std::make_shared<ScfgRule>();
    r->lhs = goal;
    if (concat) {
        r->source = {Symbol::nonterminal(goal, 1), Symbol::nonterminal(std::string(kFallbackLabel), 2)};
    } else {
        r->source = {Symbol::nonterminal(std::string(kFallbackLabel), 1)};
    }
    r->target = r->source;
    r->features[std::string(feature::kGlue)] = 1.0;
    return r;
}

bool better(const DerivationPtr& a, const DerivationPtr& b) {
    if (a->score != b->score) return a->score > b->score;
    return a->yield < b->yield;
}

using Cell = std::map<std::string, std::vector<DerivationPtr>>;

DerivationPtr make_derivation(std::shared_ptr<const ScfgRule> rule, double rule_score, std::vector<DerivationPtr> children,
                              Span span) {
    auto d = std::make_shared<Derivation>();
    d->score = rule_score;
    for (const auto& c : children) d->score += c->score;
    for (const auto& sym : rule->target) {
        if (sym.is_nonterminal()) {
            const auto& part = children.at(static_cast<std::size_t>(sym.index - 1))->yield;
            d->yield.insert(d->yield.end(), part.begin(), part.end());
        } else {
            d->yield.push_back(sym.text);
        }
    }
    d->label = rule->lhs;
    d->span = span;
    d->rule = std::move(rule);
    d->children = std::move(children);
    return d;
}

// Exact top-k over the cross product of sorted child lists: scores are
// additive, so a best-first walk over index vectors is enough.
void combine(const std::shared_ptr<const ScfgRule>& rule, double score,
             const std::vector<const std::vector<DerivationPtr>*>& lists, Span span, std::size_t k,
             std::vector<DerivationPtr>& out) {
    const std::size_t m = lists.size();
    if (m == 0) {
        out.push_back(make_derivation(rule, score, {}, span));
        return;
    }
    using Index = std::vector<std::size_t>;
    auto total = [&](const Index& idx) {
        double s = 0.0;
        for (std::size_t d = 0; d < m; ++d) s += (*lists[d])[idx[d]]->score;
        return s;
    };
    using Entry = std::pair<double, Index>;
    auto worse = [](const Entry& a, const Entry& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
    std::set<Index> seen;
    Index start(m, 0);
    heap.emplace(total(start), start);
    seen.insert(start);
    for (std::size_t produced = 0; produced < k && !heap.empty(); ++produced) {
        Index idx = heap.top().second;
        heap.pop();
        std::vector<DerivationPtr> children(m);
        for (std::size_t d = 0; d < m; ++d) children[d] = (*lists[d])[idx[d]];
        out.push_back(make_derivation(rule, score, std::move(children), span));
        for (std::size_t d = 0; d < m; ++d) {
            if (idx[d] + 1 >= lists[d]->size()) continue;
            Index next = idx;
            ++next[d];
            if (seen.insert(next).second) heap.emplace(total(next), std::move(next));
        }
    }
}

void prune(std::vector<DerivationPtr>& list, std::size_t k) {
    std::stable_sort(list.begin(), list.end(), better);
    if (list.size() > k) list.resize(k);
}

}  // namespace

ScfgRule Decoder::oov_rule(const std::string& word) {
    ScfgRule r;
    r.lhs = std::string(kFallbackLabel);
    r.source = {Symbol::terminal(word)};
    r.target = {Symbol::terminal(word)};
    r.features[std::string(feature::kOov)] = 1.0;
    return r;
}

Decoder::Decoder(const Grammar& grammar, WeightVector weights, DecoderOptions options)
    : weights_(std::move(weights)), options_(std::move(options)) {
    if (options_.k == 0) throw Error("k must be at least 1");
    for (const auto& rule : grammar.rules) {
        CompiledRule cr;
        cr.rule = std::make_shared<const ScfgRule>(rule);
        for (const auto& s : rule.target)
            if (!s.is_nonterminal()) ++cr.terminals;
        cr.score = rule_score(rule, weights_) + weights_.word_penalty * static_cast<double>(cr.terminals);
        std::size_t id = rules_.size();
        const Symbol* first = nullptr;
        for (const auto& s : rule.source) {
            if (s.is_nonterminal()) continue;
            vocabulary_.insert(s.text);
            if (!first) first = &s;
        }
        if (first) {
            by_terminal_[first->text].push_back(id);
        } else {
            nonterminal_only_.push_back(id);
        }
        rules_.push_back(std::move(cr));
    }
    glue_start_ = make_glue(options_.goal, false);
    glue_concat_ = make_glue(options_.goal, true);
    glue_score_ = rule_score(*glue_start_, weights_);
    oov_feature_score_ = weights_.weight(feature::kOov);
}

DecodeResult Decoder::decode(const Tokens& source) const {
    const std::size_t n = source.size();
    const std::size_t k = options_.k;
    DecodeResult result;
    if (n == 0) return result;

    std::unordered_set<std::string> words(source.begin(), source.end());
    std::vector<std::size_t> active = nonterminal_only_;
    for (const auto& w : words) {
        auto it = by_terminal_.find(w);
        if (it == by_terminal_.end()) continue;
        for (std::size_t id : it->second) {
            bool ok = true;
            for (const auto& s : rules_[id].rule->source) {
                if (!s.is_nonterminal() && !words.count(s.text)) {
                    ok = false;
                    break;
                }
            }
            if (ok) active.push_back(id);
        }
    }
    std::sort(active.begin(), active.end());

    std::vector<Cell> chart((n + 1) * (n + 1));
    auto cell = [&](std::size_t i, std::size_t j) -> Cell& { return chart[i * (n + 1) + j]; };
    std::vector<std::vector<DerivationPtr>> goal(n + 1);

    for (std::size_t len = 1; len <= n; ++len) {
        for (std::size_t i = 0; i + len <= n; ++i) {
            const std::size_t j = i + len;
            const Span span{i, j};
            Cell candidates;

            if (len == 1 && !vocabulary_.count(source[i])) {
                auto rule = std::make_shared<const ScfgRule>(oov_rule(source[i]));
                double s = oov_feature_score_ + weights_.word_penalty;
                candidates[rule->lhs].push_back(make_derivation(rule, s, {}, span));
            }

            for (std::size_t id : active) {
                const CompiledRule& cr = rules_[id];
                const Rhs& rhs = cr.rule->source;
                if (rhs.size() > len) continue;
                if (rhs.size() == 1 && rhs[0].is_nonterminal()) continue;  // unary, handled below
                if (cr.rule->arity() == 0 && rhs.size() != len) continue;

                std::vector<const std::vector<DerivationPtr>*> lists(cr.rule->arity(), nullptr);
                auto match = [&](auto&& self, std::size_t sym, std::size_t pos) -> void {
                    if (sym == rhs.size()) {
                        if (pos == j) combine(cr.rule, cr.score, lists, span, k, candidates[cr.rule->lhs]);
                        return;
                    }
                    const Symbol& s = rhs[sym];
                    if (!s.is_nonterminal()) {
                        if (pos < j && source[pos] == s.text) self(self, sym + 1, pos + 1);
                        return;
                    }
                    const std::size_t rest = rhs.size() - sym - 1;
                    for (std::size_t q = pos + 1; q + rest <= j; ++q) {
                        const Cell& c = cell(pos, q);
                        auto it = c.find(s.text);
                        if (it == c.end()) continue;
                        lists[static_cast<std::size_t>(s.index - 1)] = &it->second;
                        self(self, sym + 1, q);
                    }
                };
                match(match, 0, i);
            }
            for (auto& [label, list] : candidates) prune(list, k);

            // Unary closure, a few rounds deep so cycles terminate.
            Cell frontier = candidates;
            for (int round = 0; round < 4 && !frontier.empty(); ++round) {
                Cell produced;
                for (std::size_t id : active) {
                    const CompiledRule& cr = rules_[id];
                    const Rhs& rhs = cr.rule->source;
                    if (rhs.size() != 1 || !rhs[0].is_nonterminal()) continue;
                    auto it = frontier.find(rhs[0].text);
                    if (it == frontier.end()) continue;
                    combine(cr.rule, cr.score, {&it->second}, span, k, produced[cr.rule->lhs]);
                }
                Cell next;
                for (auto& [label, list] : produced) {
                    auto& target = candidates[label];
                    std::set<const Derivation*> fresh;
                    for (const auto& d : list) fresh.insert(d.get());
                    target.insert(target.end(), list.begin(), list.end());
                    prune(target, k);
                    for (const auto& d : target)
                        if (fresh.count(d.get())) next[label].push_back(d);
                }
                frontier = std::move(next);
            }
            cell(i, j) = std::move(candidates);

            if (i == 0) {
                auto& g = goal[j];
                for (const auto& [label, list] : cell(0, j)) {
                    for (const auto& d : list) g.push_back(make_derivation(glue_start_, glue_score_, {d}, span));
                }
                for (std::size_t m = 1; m < j; ++m) {
                    if (goal[m].empty()) continue;
                    for (const auto& [label, list] : cell(m, j)) {
                        combine(glue_concat_, glue_score_, {&goal[m], &list}, span, k, g);
                    }
                }
                prune(g, k);
            }
        }
    }

    result.kbest = goal[n];
    if (result.translated()) return result;

    std::vector<bool> covered(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
            if (cell(i, j).empty()) continue;
            for (std::size_t p = i; p < j; ++p) covered[p] = true;
        }
    }
    for (std::size_t p = 0; p < n;) {
        if (covered[p]) {
            ++p;
            continue;
        }
        std::size_t q = p;
        while (q < n && !covered[q]) ++q;
        result.uncovered.push_back({p, q});
        p = q;
    }
    if (result.uncovered.empty()) {
        std::size_t reach = 0;
        for (std::size_t m = 1; m <= n; ++m)
            if (!goal[m].empty()) reach = m;
        result.uncovered.push_back({reach, n});
    }
    return result;
}

DecodeResult decode(const Tokens& source, const Grammar& grammar, const WeightVector& weights, std::size_t k,
                    const std::string& goal) {
    return Decoder(grammar, weights, DecoderOptions{k, goal}).decode(source);
}

void write_kbest(std::ostream& out, std::size_t sentence_id, const DecodeResult& result) {
    if (!result.translated()) {
        out << sentence_id << " ||| 0 |||  ||| untranslatable";
        for (const auto& s : result.uncovered) out << ' ' << to_string(s);
        out << '\n';
        return;
    }
    for (std::size_t r = 0; r < result.kbest.size(); ++r) {
        const auto& d = *result.kbest[r];
        out << sentence_id << " ||| " << r + 1 << " ||| ";
        for (std::size_t w = 0; w < d.yield.size(); ++w) out << (w ? " " : "") << d.yield[w];
        out << " ||| " << detail::format_double(d.score) << '\n';
    }
}

}  // namespace treegraft
