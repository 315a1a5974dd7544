#include "treegraft/grafting.hpp"

#include <istream>
#include <ostream>

#include "treegraft/error.hpp"
#include "treegraft/parallel.hpp"

namespace treegraft {

const char* graft_case_name(GraftCase c) {
    switch (c) {
        case GraftCase::ExactGraft: return "ExactGraft";
        case GraftCase::SplitInsert: return "SplitInsert";
        case GraftCase::Overlay: return "Overlay";
        case GraftCase::CrossingSkipped: return "CrossingSkipped";
        case GraftCase::NoNodeSkipped: return "NoNodeSkipped";
    }
    return "?";
}

namespace {

void check_span(const SpanIndex& index, Span span) {
    if (span.start >= span.end || span.end > index.sentence_length()) {
        throw Error("tag span " + to_string(span) + " does not fit a sentence of " +
                    std::to_string(index.sentence_length()) + " tokens");
    }
}

}  // namespace

Match classify_match(const SpanIndex& index, Span span) {
    check_span(index, span);
    if (auto top = index.highest(span)) return Match{MatchKind::Exact, index.node(*top).path, 0, 0};

    // Descend to the lowest node whose span still contains the tag.
    std::size_t id = 0;
    while (true) {
        bool descended = false;
        for (std::size_t c : index.node(id).children) {
            if (index.node(c).span.contains(span)) {
                id = c;
                descended = true;
                break;
            }
        }
        if (!descended) break;
    }

    const auto& parent = index.node(id);
    std::optional<std::size_t> first, last;
    for (std::size_t i = 0; i < parent.children.size(); ++i) {
        const Span& cs = index.node(parent.children[i]).span;
        if (cs.start == span.start) first = i;
        if (cs.end == span.end) last = i;
    }
    if (first && last && *first < *last) {
        return Match{MatchKind::AdjacentDaughters, parent.path, *first, *last + 1};
    }
    return Match{MatchKind::Crossing, {}, 0, 0};
}

Match classify_match(const Tree& tree, Span span) { return classify_match(SpanIndex(tree), span); }

GraftOutcome graft_in_place(Tree& tree, const SemanticTag& tag) {
    Match match;
    {
        SpanIndex index(tree);
        match = classify_match(index, tag.span);
    }
    switch (match.kind) {
        case MatchKind::Exact: {
            Tree& node = node_at(tree, match.node);
            GraftCase c = node.label.semantic ? GraftCase::Overlay : GraftCase::ExactGraft;
            node.label.semantic = semantic_part(tag);
            return {c, match.node};
        }
        case MatchKind::AdjacentDaughters: {
            if (tag.kind != TagKind::NamedEntity) return {GraftCase::NoNodeSkipped, std::nullopt};
            Tree& parent = node_at(tree, match.node);
            Tree inserted;
            inserted.label = NodeLabel{"NP", semantic_part(tag)};
            auto first = parent.children.begin() + static_cast<std::ptrdiff_t>(match.first_child);
            auto last = parent.children.begin() + static_cast<std::ptrdiff_t>(match.last_child);
            inserted.children.assign(std::make_move_iterator(first), std::make_move_iterator(last));
            auto pos = parent.children.erase(first, last);
            parent.children.insert(pos, std::move(inserted));
            NodePath path = match.node;
            path.push_back(match.first_child);
            return {GraftCase::SplitInsert, std::move(path)};
        }
        case MatchKind::Crossing: break;
    }
    return {GraftCase::CrossingSkipped, std::nullopt};
}

std::pair<Tree, GraftOutcome> graft_one(Tree tree, const SemanticTag& tag) {
    GraftOutcome outcome = graft_in_place(tree, tag);
    return {std::move(tree), std::move(outcome)};
}

std::size_t GraftReport::total_tags() const {
    std::size_t n = rejected;
    for (std::size_t c : counts) n += c;
    return n;
}

GraftReport& GraftReport::operator+=(const GraftReport& other) {
    for (std::size_t i = 0; i < kGraftCaseCount; ++i) counts[i] += other.counts[i];
    rejected += other.rejected;
    sentences += other.sentences;
    diagnostics.insert(diagnostics.end(), other.diagnostics.begin(), other.diagnostics.end());
    return *this;
}

void write_report_tsv(const GraftReport& report, std::ostream& out) {
    for (std::size_t i = 0; i < kGraftCaseCount; ++i) {
        out << graft_case_name(static_cast<GraftCase>(i)) << '\t' << report.counts[i] << '\n';
    }
    out << "Rejected\t" << report.rejected << '\n';
}

std::pair<Tree, GraftReport> graft_sentence(Tree tree, const std::vector<SemanticTag>& tags, GraftOrder order) {
    GraftReport report;
    report.sentences = 1;
    // Insertion never changes the yield, so the length checked here holds
    // for every tag.
    for (const auto& tag : sort_for_grafting(tags, order)) {
        GraftDiagnostic diag{tag.sentence_id, tag, std::nullopt, {}};
        try {
            GraftOutcome outcome = graft_in_place(tree, tag);
            ++report.counts[static_cast<std::size_t>(outcome.graft_case)];
            diag.graft_case = outcome.graft_case;
        } catch (const Error& e) {
            ++report.rejected;
            diag.message = e.what();
        }
        report.diagnostics.push_back(std::move(diag));
    }
    return {std::move(tree), std::move(report)};
}

GraftReport graft_corpus(std::istream& trees, const TagsBySentence& tags, std::ostream& out,
                         const GraftCorpusOptions& options) {
    std::vector<std::string> lines;
    for (std::string line; std::getline(trees, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    if (!tags.empty() && tags.rbegin()->first >= lines.size()) {
        throw Error("tag file indexes " + std::to_string(tags.rbegin()->first + 1) + " sentences but tree file has " +
                    std::to_string(lines.size()));
    }

    static const std::vector<SemanticTag> kNoTags;
    std::vector<std::string> results(lines.size());
    std::vector<GraftReport> reports(lines.size());
    parallel_for(lines.size(), options.jobs, [&](std::size_t i) {
        auto it = tags.find(i);
        const auto& sentence_tags = it == tags.end() ? kNoTags : it->second;
        const std::string& line = lines[i];
        if (line.find_first_not_of(" \t") == std::string::npos) {
            GraftReport r;
            for (const auto& tag : sentence_tags) {
                ++r.rejected;
                r.diagnostics.push_back({i, tag, std::nullopt, "sentence has no parse"});
            }
            reports[i] = std::move(r);
            results[i] = line;
            return;
        }
        Tree parsed;
        try {
            parsed = parse_tree(line);
        } catch (const TreeParseError& e) {
            throw FormatError(e.what(), i + 1);
        }
        auto [grafted, report] = graft_sentence(parsed, sentence_tags, options.order);
        for (auto& d : report.diagnostics) d.sentence_id = i;
        results[i] = grafted == parsed ? line : serialize_tree(grafted);
        reports[i] = std::move(report);
    });

    GraftReport total;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        out << results[i] << '\n';
        if (options.warnings && lines[i].find_first_not_of(" \t") == std::string::npos) {
            *options.warnings << "warning: sentence " << i << " has no parse, passed through blank\n";
        }
        total += reports[i];
    }
    return total;
}

}  // namespace treegraft
