#pragma once

// Penn-Treebank-style constituency trees: parsing, serialization, and span
// queries over token positions.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace treegraft {

// Half-open token range [start, end).
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - start; }
    bool contains(const Span& other) const { return start <= other.start && other.end <= end; }

    friend auto operator<=>(const Span&, const Span&) = default;
};

std::string to_string(const Span& span);

// A node category. Grafted semantic tags are kept apart from the syntactic
// category and only joined with '-' when rendered, so "GPE-ite" on "NP" stays
// recoverable as (NP, GPE-ite).
struct NodeLabel {
    std::string syntactic;
    std::optional<std::string> semantic;

    std::string rendered() const;

    friend bool operator==(const NodeLabel&, const NodeLabel&) = default;
};

struct Tree {
    NodeLabel label;
    std::vector<Tree> children;
    std::optional<std::string> token;  // set iff this is a leaf (preterminal)

    static Tree leaf(std::string label, std::string token);
    static Tree node(std::string label, std::vector<Tree> children);

    bool is_leaf() const { return children.empty(); }
    std::size_t node_count() const;

    friend bool operator==(const Tree&, const Tree&) = default;
};

// Child-index path from the root; the empty path is the root itself.
using NodePath = std::vector<std::size_t>;

const Tree& node_at(const Tree& root, const NodePath& path);
Tree& node_at(Tree& root, const NodePath& path);

// Parses one bracketed tree. An outer unlabeled wrapper "( ... )" is removed.
// Throws TreeParseError carrying the character offset of the problem.
Tree parse_tree(std::string_view text);

std::string serialize_tree(const Tree& tree);

std::vector<std::string> yield_tokens(const Tree& tree);

struct IndexedNode {
    const Tree* node = nullptr;
    NodePath path;
    Span span;
    std::size_t depth = 0;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
};

// Node spans for one tree, plus for each span the nodes that cover it exactly,
// ordered root-to-leaf. Holds pointers into the tree, which must outlive it.
class SpanIndex {
public:
    explicit SpanIndex(const Tree& tree);

    std::size_t sentence_length() const { return length_; }
    std::size_t size() const { return nodes_.size(); }

    // Preorder; id 0 is the root.
    const std::vector<IndexedNode>& nodes() const { return nodes_; }
    const IndexedNode& node(std::size_t id) const { return nodes_.at(id); }

    // Ids of nodes whose span equals `span`, root-to-leaf. Empty when no node
    // matches or the span is out of range.
    std::span<const std::size_t> covering(Span span) const;

    // Topmost node of the exact-cover chain, if any.
    std::optional<std::size_t> highest(Span span) const;

private:
    std::size_t slot(Span span) const { return span.start * (length_ + 1) + span.end; }

    std::size_t length_ = 0;
    std::vector<IndexedNode> nodes_;
    std::vector<std::vector<std::size_t>> exact_;
};

inline SpanIndex build_span_index(const Tree& tree) { return SpanIndex(tree); }

}  // namespace treegraft
