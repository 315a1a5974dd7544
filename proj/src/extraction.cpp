#include "treegraft/extraction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "numfmt.hpp"
#include "treegraft/error.hpp"

namespace treegraft {

std::vector<PhrasePair> extract_phrase_pairs(const Alignment& alignment, std::size_t source_length,
                                             std::size_t target_length, std::size_t max_length) {
    std::vector<std::vector<std::size_t>> by_source(source_length), by_target(target_length);
    for (const auto& [i, j] : alignment.links) {
        by_source[i].push_back(j);
        by_target[j].push_back(i);
    }

    std::vector<PhrasePair> out;
    for (std::size_t s = 0; s < source_length; ++s) {
        if (by_source[s].empty()) continue;
        std::size_t tmin = target_length, tmax = 0;
        for (std::size_t e = s + 1; e <= std::min(source_length, s + max_length); ++e) {
            for (std::size_t j : by_source[e - 1]) {
                tmin = std::min(tmin, j);
                tmax = std::max(tmax, j);
            }
            if (by_source[e - 1].empty()) continue;  // not tight on the right
            if (tmax - tmin + 1 > max_length) continue;
            bool consistent = true;
            for (std::size_t t = tmin; t <= tmax && consistent; ++t) {
                for (std::size_t i : by_target[t]) {
                    if (i < s || i >= e) {
                        consistent = false;
                        break;
                    }
                }
            }
            if (consistent) out.push_back({{s, e}, {tmin, tmax + 1}});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PhrasePair> extract_phrase_pairs(const SentencePair& pair, std::size_t max_length) {
    return extract_phrase_pairs(pair.alignment, pair.source.size(), pair.target.size(), max_length);
}

std::string Label::rendered() const {
    switch (form) {
        case Form::Constituent: return first;
        case Form::Concat: return first + "+" + second;
        case Form::MissingRight: return first + "/" + second;
        case Form::MissingLeft: return second + "\\" + first;
        case Form::Fallback: break;
    }
    return std::string(kFallbackLabel);
}

Label samt_label(const SpanIndex& index, Span span, LabelMode mode) {
    const std::size_t n = index.sentence_length();
    if (span.start >= span.end || span.end > n) {
        throw Error("span " + to_string(span) + " out of range for a sentence of " + std::to_string(n) + " tokens");
    }
    if (mode == LabelMode::Hiero) return {};

    auto name = [&](Span s) -> std::optional<std::string> {
        if (auto id = index.highest(s)) return index.node(*id).node->label.rendered();
        return std::nullopt;
    };

    if (auto a = name(span)) return {Label::Form::Constituent, *a, {}};

    for (std::size_t k = span.start + 1; k < span.end; ++k) {
        auto a = name({span.start, k});
        if (!a) continue;
        if (auto b = name({k, span.end})) return {Label::Form::Concat, *a, *b};
    }
    for (std::size_t e = span.end + 1; e <= n; ++e) {
        auto a = name({span.start, e});
        if (!a) continue;
        if (auto b = name({span.end, e})) return {Label::Form::MissingRight, *a, *b};
    }
    for (std::size_t s = span.start; s-- > 0;) {
        auto a = name({s, span.end});
        if (!a) continue;
        if (auto b = name({s, span.start})) return {Label::Form::MissingLeft, *a, *b};
    }
    return {};
}

std::size_t ScfgRule::arity() const {
    return static_cast<std::size_t>(
        std::count_if(source.begin(), source.end(), [](const Symbol& s) { return s.is_nonterminal(); }));
}

std::string format_rhs(const Rhs& rhs) {
    std::string out;
    for (const auto& sym : rhs) {
        if (!out.empty()) out += ' ';
        if (sym.is_nonterminal()) {
            out += '[' + sym.text + ',' + std::to_string(sym.index) + ']';
        } else {
            out += sym.text;
        }
    }
    return out;
}

Rhs parse_rhs(std::string_view text) {
    Rhs rhs;
    for (auto& word : split_tokens(text)) {
        if (word.size() >= 5 && word.front() == '[' && word.back() == ']') {
            auto comma = word.rfind(',');
            if (comma != std::string::npos && comma > 1 && comma + 2 < word.size()) {
                int k = 0;
                const char* b = word.data() + comma + 1;
                const char* e = word.data() + word.size() - 1;
                auto [ptr, ec] = std::from_chars(b, e, k);
                if (ec == std::errc() && ptr == e && k > 0) {
                    rhs.push_back(Symbol::nonterminal(word.substr(1, comma - 1), k));
                    continue;
                }
            }
        }
        rhs.push_back(Symbol::terminal(std::move(word)));
    }
    return rhs;
}

std::string format_rule(const ScfgRule& rule) {
    std::string out = '[' + rule.lhs + "] ||| " + format_rhs(rule.source) + " ||| " + format_rhs(rule.target) + " |||";
    for (const auto& [name, value] : rule.features) out += ' ' + name + '=' + detail::format_double(value);
    return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    static constexpr std::string_view sep = "|||";
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (true) {
        std::size_t at = line.find(sep, begin);
        if (at == std::string_view::npos) {
            out.push_back(line.substr(begin));
            return out;
        }
        out.push_back(line.substr(begin, at - begin));
        begin = at + sep.size();
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::size_t terminal_count(const Rhs& rhs) {
    return static_cast<std::size_t>(
        std::count_if(rhs.begin(), rhs.end(), [](const Symbol& s) { return !s.is_nonterminal(); }));
}

}  // namespace

ScfgRule parse_rule(std::string_view line) {
    auto fields = split_fields(line);
    if (fields.size() != 4) throw Error("expected 4 '|||'-separated fields, found " + std::to_string(fields.size()));
    ScfgRule rule;
    auto lhs = trim(fields[0]);
    if (lhs.size() < 3 || lhs.front() != '[' || lhs.back() != ']') throw Error("malformed left-hand side");
    rule.lhs = std::string(lhs.substr(1, lhs.size() - 2));
    rule.source = parse_rhs(fields[1]);
    rule.target = parse_rhs(fields[2]);
    if (rule.source.empty() || rule.target.empty()) throw Error("empty right-hand side");

    std::vector<int> src_nts, tgt_nts;
    for (const auto& s : rule.source)
        if (s.is_nonterminal()) src_nts.push_back(s.index);
    for (const auto& s : rule.target)
        if (s.is_nonterminal()) tgt_nts.push_back(s.index);
    std::sort(src_nts.begin(), src_nts.end());
    std::sort(tgt_nts.begin(), tgt_nts.end());
    for (std::size_t i = 0; i < src_nts.size(); ++i) {
        if (src_nts[i] != static_cast<int>(i + 1)) throw Error("nonterminal indices must be 1..n on the source side");
    }
    if (src_nts != tgt_nts) throw Error("nonterminal co-indexing is not a bijection");
    for (const auto& s : rule.source) {
        if (!s.is_nonterminal()) continue;
        for (const auto& t : rule.target) {
            if (t.index == s.index && t.text != s.text) throw Error("co-indexed nonterminals disagree on label");
        }
    }

    for (const auto& item : split_tokens(fields[3])) {
        auto eq = item.rfind('=');
        if (eq == std::string::npos || eq == 0) throw Error("malformed feature '" + item + "'");
        double value = 0;
        const char* b = item.data() + eq + 1;
        const char* e = item.data() + item.size();
        auto [ptr, ec] = std::from_chars(b, e, value);
        if (ec != std::errc() || ptr != e || !std::isfinite(value)) throw Error("malformed feature '" + item + "'");
        rule.features[item.substr(0, eq)] = value;
    }
    return rule;
}

std::vector<ScfgRule> extract_rules(const SentencePair& pair, const ExtractionConfig& config) {
    std::optional<SpanIndex> index;
    if (config.mode == LabelMode::Samt) {
        if (!pair.target_tree) throw Error("sentence " + std::to_string(pair.id) + " has no target tree");
        index.emplace(*pair.target_tree);
    }
    auto label_of = [&](Span target) {
        return index ? samt_label(*index, target, LabelMode::Samt).rendered() : std::string(kFallbackLabel);
    };

    const auto phrases = extract_phrase_pairs(pair, config.max_phrase_length);
    std::vector<ScfgRule> rules;

    // `holes` are sub-phrase pairs in source order.
    auto emit = [&](const PhrasePair& outer, const std::string& lhs, const std::vector<const PhrasePair*>& holes) {
        ScfgRule rule;
        rule.lhs = lhs;
        std::vector<std::string> labels;
        for (const auto* h : holes) labels.push_back(label_of(h->target));

        for (std::size_t i = outer.source.start; i < outer.source.end;) {
            bool gap = false;
            for (std::size_t h = 0; h < holes.size(); ++h) {
                if (holes[h]->source.start == i) {
                    rule.source.push_back(Symbol::nonterminal(labels[h], static_cast<int>(h + 1)));
                    i = holes[h]->source.end;
                    gap = true;
                    break;
                }
            }
            if (!gap) rule.source.push_back(Symbol::terminal(pair.source[i++]));
        }
        if (rule.source.size() > config.max_source_symbols) return;
        if (terminal_count(rule.source) == 0) return;

        for (std::size_t j = outer.target.start; j < outer.target.end;) {
            bool gap = false;
            for (std::size_t h = 0; h < holes.size(); ++h) {
                if (holes[h]->target.start == j) {
                    rule.target.push_back(Symbol::nonterminal(labels[h], static_cast<int>(h + 1)));
                    j = holes[h]->target.end;
                    gap = true;
                    break;
                }
            }
            if (!gap) rule.target.push_back(Symbol::terminal(pair.target[j++]));
        }
        rules.push_back(std::move(rule));
    };

    for (const auto& outer : phrases) {
        const std::string lhs = label_of(outer.target);
        emit(outer, lhs, {});
        if (config.max_nonterminals == 0) continue;

        std::vector<const PhrasePair*> inner;
        for (const auto& p : phrases) {
            if (p != outer && outer.source.contains(p.source) && outer.target.contains(p.target)) inner.push_back(&p);
        }
        for (std::size_t a = 0; a < inner.size(); ++a) {
            emit(outer, lhs, {inner[a]});
            if (config.max_nonterminals < 2) continue;
            for (std::size_t b = 0; b < inner.size(); ++b) {
                const Span& sa = inner[a]->source;
                const Span& sb = inner[b]->source;
                if (sb.start < sa.end) continue;  // need a before b, disjoint
                if (config.forbid_adjacent_source_nonterminals && sb.start == sa.end) continue;
                emit(outer, lhs, {inner[a], inner[b]});
            }
        }
    }
    return rules;
}

void GrammarScorer::add(const ScfgRule& instance) {
    ++counts_[{instance.lhs, format_rhs(instance.source), format_rhs(instance.target)}];
    ++instances_;
}

void GrammarScorer::add(const std::vector<ScfgRule>& instances) {
    for (const auto& r : instances) add(r);
}

void GrammarScorer::merge(const GrammarScorer& other) {
    for (const auto& [key, c] : other.counts_) counts_[key] += c;
    instances_ += other.instances_;
}

Grammar GrammarScorer::finish() const {
    std::map<std::string, std::size_t> by_source;
    std::map<std::pair<std::string, std::string>, std::size_t> by_target_lhs;
    for (const auto& [key, c] : counts_) {
        const auto& [lhs, src, tgt] = key;
        by_source[src] += c;
        by_target_lhs[{lhs, tgt}] += c;
    }

    Grammar g;
    g.rules.reserve(counts_.size());
    for (const auto& [key, c] : counts_) {
        const auto& [lhs, src, tgt] = key;
        ScfgRule rule;
        rule.lhs = lhs;
        rule.source = parse_rhs(src);
        rule.target = parse_rhs(tgt);
        const double count = static_cast<double>(c);
        rule.features[std::string(feature::kTargetGivenSource)] = count / static_cast<double>(by_source.at(src));
        rule.features[std::string(feature::kSourceGivenTarget)] =
            count / static_cast<double>(by_target_lhs.at({lhs, tgt}));
        rule.features[std::string(feature::kCount)] = count;
        rule.features[std::string(feature::kSourceWords)] = static_cast<double>(terminal_count(rule.source));
        rule.features[std::string(feature::kTargetWords)] = static_cast<double>(terminal_count(rule.target));
        g.rules.push_back(std::move(rule));
    }
    return g;
}

Grammar score_grammar(const std::vector<ScfgRule>& instances) {
    GrammarScorer scorer;
    scorer.add(instances);
    return scorer.finish();
}

void write_grammar(const Grammar& grammar, std::ostream& out) {
    for (const auto& [key, value] : grammar.metadata) out << "# " << key << '=' << value << '\n';
    for (const auto& rule : grammar.rules) out << format_rule(rule) << '\n';
}

Grammar read_grammar(std::istream& in) {
    Grammar g;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto body = trim(std::string_view(line).substr(1));
            auto eq = body.find('=');
            if (eq != std::string_view::npos) g.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        try {
            g.rules.push_back(parse_rule(line));
        } catch (const Error& e) {
            throw FormatError(e.what(), lineno);
        }
    }
    return g;
}

}  // namespace treegraft
