#pragma once

// Word-aligned parallel corpus: Pharaoh alignments, four-file bitext reader,
// and token/type statistics.

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "treegraft/treebank.hpp"

namespace treegraft {

using Tokens = std::vector<std::string>;

Tokens split_tokens(std::string_view line);

// Links are (source index, target index), sorted and unique.
struct Alignment {
    std::vector<std::pair<std::size_t, std::size_t>> links;

    friend bool operator==(const Alignment&, const Alignment&) = default;
};

// Parses "i-j i-j ..." where i indexes the source sentence. Throws Error on a
// malformed pair or an index outside the sentence lengths.
Alignment parse_alignment(std::string_view line, std::size_t source_length, std::size_t target_length);

std::string format_alignment(const Alignment& alignment);

struct SentencePair {
    std::size_t id = 0;
    Tokens source;
    Tokens target;
    Alignment alignment;
    std::optional<Tree> target_tree;  // absent when no tree file was given
};

struct SkippedPair {
    std::size_t id = 0;
    std::string reason;
};

struct BitextPaths {
    std::string source;
    std::string target;
    std::string alignment;
    std::string trees;  // optional; empty means no trees
};

// Streams validated sentence pairs one line at a time. The constructor checks
// that all files have the same number of lines and throws Error otherwise.
// Pairs that fail validation are skipped and recorded.
class BitextReader {
public:
    explicit BitextReader(const BitextPaths& paths);

    std::optional<SentencePair> next();

    std::size_t lines() const { return lines_; }
    const std::vector<SkippedPair>& skipped() const { return skipped_; }

private:
    std::ifstream source_, target_, alignment_, trees_;
    bool has_trees_ = false;
    std::size_t lines_ = 0;
    std::size_t next_id_ = 0;
    std::vector<SkippedPair> skipped_;
};

std::vector<SentencePair> load_bitext(const BitextPaths& paths, std::vector<SkippedPair>* skipped = nullptr);

struct CorpusStats {
    std::size_t lines = 0;
    std::size_t source_tokens = 0;
    std::size_t source_types = 0;
    std::size_t target_tokens = 0;
    std::size_t target_types = 0;
};

class StatsAccumulator {
public:
    void add(const Tokens& source, const Tokens& target);
    void add(const SentencePair& pair) { add(pair.source, pair.target); }
    CorpusStats stats() const;

private:
    std::size_t lines_ = 0, source_tokens_ = 0, target_tokens_ = 0;
    std::unordered_set<std::string> source_types_, target_types_;
};

CorpusStats corpus_stats(const std::vector<SentencePair>& pairs);

}  // namespace treegraft
