#include "treegraft/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "treegraft/error.hpp"

namespace treegraft {

Tokens split_tokens(std::string_view line) {
    Tokens out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t begin = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > begin) out.emplace_back(line.substr(begin, i - begin));
    }
    return out;
}

Alignment parse_alignment(std::string_view line, std::size_t source_length, std::size_t target_length) {
    Alignment a;
    for (const auto& item : split_tokens(line)) {
        auto dash = item.find('-');
        std::size_t i = 0, j = 0;
        bool ok = dash != std::string::npos && dash > 0 && dash + 1 < item.size();
        if (ok) {
            const char* b = item.data();
            auto r1 = std::from_chars(b, b + dash, i);
            auto r2 = std::from_chars(b + dash + 1, b + item.size(), j);
            ok = r1.ec == std::errc() && r1.ptr == b + dash && r2.ec == std::errc() && r2.ptr == b + item.size();
        }
        if (!ok) throw Error("malformed alignment pair '" + item + "'");
        if (i >= source_length || j >= target_length) {
            throw Error("alignment pair '" + item + "' out of range for lengths " + std::to_string(source_length) +
                        "/" + std::to_string(target_length));
        }
        a.links.emplace_back(i, j);
    }
    std::sort(a.links.begin(), a.links.end());
    a.links.erase(std::unique(a.links.begin(), a.links.end()), a.links.end());
    return a;
}

std::string format_alignment(const Alignment& alignment) {
    std::string out;
    for (const auto& [i, j] : alignment.links) {
        if (!out.empty()) out += ' ';
        out += std::to_string(i) + "-" + std::to_string(j);
    }
    return out;
}

namespace {

std::size_t count_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return in;
}

void chomp(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
}

}  // namespace

BitextReader::BitextReader(const BitextPaths& paths) : has_trees_(!paths.trees.empty()) {
    std::size_t ns = count_lines(paths.source);
    std::size_t nt = count_lines(paths.target);
    std::size_t na = count_lines(paths.alignment);
    std::size_t ntr = has_trees_ ? count_lines(paths.trees) : ns;
    if (ns != nt || ns != na || ns != ntr) {
        std::string msg = "line count mismatch: source " + std::to_string(ns) + ", target " + std::to_string(nt) +
                          ", alignment " + std::to_string(na);
        if (has_trees_) msg += ", trees " + std::to_string(ntr);
        throw Error(msg);
    }
    lines_ = ns;
    source_ = open_input(paths.source);
    target_ = open_input(paths.target);
    alignment_ = open_input(paths.alignment);
    if (has_trees_) trees_ = open_input(paths.trees);
}

std::optional<SentencePair> BitextReader::next() {
    while (next_id_ < lines_) {
        std::string src, tgt, aln, tree;
        std::getline(source_, src);
        std::getline(target_, tgt);
        std::getline(alignment_, aln);
        if (has_trees_) std::getline(trees_, tree);
        chomp(src), chomp(tgt), chomp(aln), chomp(tree);

        SentencePair pair;
        pair.id = next_id_++;
        pair.source = split_tokens(src);
        pair.target = split_tokens(tgt);
        try {
            pair.alignment = parse_alignment(aln, pair.source.size(), pair.target.size());
        } catch (const Error& e) {
            skipped_.push_back({pair.id, std::string("bad alignment: ") + e.what()});
            continue;
        }
        if (has_trees_) {
            if (tree.find_first_not_of(" \t") == std::string::npos) {
                skipped_.push_back({pair.id, "no parse"});
                continue;
            }
            try {
                pair.target_tree = parse_tree(tree);
            } catch (const TreeParseError& e) {
                skipped_.push_back({pair.id, std::string("bad tree: ") + e.what()});
                continue;
            }
            if (yield_tokens(*pair.target_tree) != pair.target) {
                skipped_.push_back({pair.id, "yield mismatch"});
                continue;
            }
        }
        return pair;
    }
    return std::nullopt;
}

std::vector<SentencePair> load_bitext(const BitextPaths& paths, std::vector<SkippedPair>* skipped) {
    BitextReader reader(paths);
    std::vector<SentencePair> out;
    while (auto p = reader.next()) out.push_back(std::move(*p));
    if (skipped) *skipped = reader.skipped();
    return out;
}

void StatsAccumulator::add(const Tokens& source, const Tokens& target) {
    ++lines_;
    source_tokens_ += source.size();
    target_tokens_ += target.size();
    source_types_.insert(source.begin(), source.end());
    target_types_.insert(target.begin(), target.end());
}

CorpusStats StatsAccumulator::stats() const {
    return {lines_, source_tokens_, source_types_.size(), target_tokens_, target_types_.size()};
}

CorpusStats corpus_stats(const std::vector<SentencePair>& pairs) {
    StatsAccumulator acc;
    for (const auto& p : pairs) acc.add(p);
    return acc.stats();
}

}  // namespace treegraft
