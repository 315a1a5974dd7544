#include "treegraft/treebank.hpp"

#include <cctype>
#include <utility>

#include "treegraft/error.hpp"

namespace treegraft {

std::string to_string(const Span& span) {
    return "[" + std::to_string(span.start) + "," + std::to_string(span.end) + ")";
}

std::string NodeLabel::rendered() const {
    if (!semantic) return syntactic;
    return syntactic + "-" + *semantic;
}

Tree Tree::leaf(std::string label, std::string token) {
    Tree t;
    t.label.syntactic = std::move(label);
    t.token = std::move(token);
    return t;
}

Tree Tree::node(std::string label, std::vector<Tree> children) {
    Tree t;
    t.label.syntactic = std::move(label);
    t.children = std::move(children);
    return t;
}

std::size_t Tree::node_count() const {
    std::size_t n = 1;
    for (const auto& c : children) n += c.node_count();
    return n;
}

const Tree& node_at(const Tree& root, const NodePath& path) {
    const Tree* t = &root;
    for (std::size_t i : path) t = &t->children.at(i);
    return *t;
}

Tree& node_at(Tree& root, const NodePath& path) {
    Tree* t = &root;
    for (std::size_t i : path) t = &t->children.at(i);
    return *t;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

class TreeReader {
public:
    explicit TreeReader(std::string_view text) : text_(text) {}

    Tree read() {
        skip_space();
        if (at_end()) throw TreeParseError("empty input", pos_);
        if (text_[pos_] != '(') throw TreeParseError("expected '('", pos_);

        // "( (S ...) )" wrapper: an open bracket directly followed by another.
        std::size_t save = pos_;
        ++pos_;
        skip_space();
        Tree tree;
        if (!at_end() && text_[pos_] == '(') {
            tree = read_node();
            skip_space();
            expect_close();
        } else {
            pos_ = save;
            tree = read_node();
        }
        skip_space();
        if (!at_end()) {
            if (text_[pos_] == ')') throw TreeParseError("unbalanced ')'", pos_);
            throw TreeParseError("trailing text after tree", pos_);
        }
        return tree;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }

    void skip_space() {
        while (!at_end() && is_space(text_[pos_])) ++pos_;
    }

    void expect_close() {
        if (at_end()) throw TreeParseError("unbalanced brackets, missing ')'", pos_);
        if (text_[pos_] != ')') throw TreeParseError("expected ')'", pos_);
        ++pos_;
    }

    std::string read_atom() {
        std::size_t begin = pos_;
        while (!at_end() && !is_space(text_[pos_]) && text_[pos_] != '(' && text_[pos_] != ')') ++pos_;
        return std::string(text_.substr(begin, pos_ - begin));
    }

    Tree read_node() {
        std::size_t open = pos_;
        ++pos_;  // '('
        skip_space();
        if (at_end()) throw TreeParseError("unbalanced brackets, missing ')'", pos_);
        if (text_[pos_] == ')') throw TreeParseError("empty constituent", open);
        if (text_[pos_] == '(') throw TreeParseError("missing label", pos_);

        Tree node;
        node.label.syntactic = read_atom();
        skip_space();
        if (at_end()) throw TreeParseError("unbalanced brackets, missing ')'", pos_);
        if (text_[pos_] == ')') throw TreeParseError("leaf '" + node.label.syntactic + "' has no token", open);

        if (text_[pos_] != '(') {
            node.token = read_atom();
            skip_space();
            if (!at_end() && text_[pos_] != ')') {
                throw TreeParseError("constituent mixes a bare token with other material", pos_);
            }
            expect_close();
            return node;
        }

        while (true) {
            skip_space();
            if (at_end()) throw TreeParseError("unbalanced brackets, missing ')'", pos_);
            if (text_[pos_] == ')') break;
            if (text_[pos_] != '(') throw TreeParseError("bare token among constituents", pos_);
            node.children.push_back(read_node());
        }
        ++pos_;
        return node;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void write_tree(const Tree& t, std::string& out) {
    out += '(';
    out += t.label.rendered();
    if (t.token) {
        out += ' ';
        out += *t.token;
    } else {
        for (const auto& c : t.children) {
            out += ' ';
            write_tree(c, out);
        }
    }
    out += ')';
}

void collect_tokens(const Tree& t, std::vector<std::string>& out) {
    if (t.token) {
        out.push_back(*t.token);
        return;
    }
    for (const auto& c : t.children) collect_tokens(c, out);
}

}  // namespace

Tree parse_tree(std::string_view text) { return TreeReader(text).read(); }

std::string serialize_tree(const Tree& tree) {
    std::string out;
    write_tree(tree, out);
    return out;
}

std::vector<std::string> yield_tokens(const Tree& tree) {
    std::vector<std::string> out;
    collect_tokens(tree, out);
    return out;
}

SpanIndex::SpanIndex(const Tree& tree) {
    // Preorder walk assigning spans by counting leaves.
    std::size_t next_token = 0;
    struct Frame {
        const Tree* node;
        NodePath path;
        std::size_t depth;
        std::optional<std::size_t> parent;
    };
    auto visit = [&](auto&& self, const Frame& f) -> std::size_t {
        std::size_t id = nodes_.size();
        nodes_.push_back(IndexedNode{f.node, f.path, Span{next_token, next_token}, f.depth, f.parent, {}});
        if (f.node->token) {
            ++next_token;
        } else {
            for (std::size_t i = 0; i < f.node->children.size(); ++i) {
                NodePath p = f.path;
                p.push_back(i);
                std::size_t child = self(self, Frame{&f.node->children[i], std::move(p), f.depth + 1, id});
                nodes_[id].children.push_back(child);
            }
        }
        nodes_[id].span.end = next_token;
        return id;
    };
    visit(visit, Frame{&tree, {}, 0, std::nullopt});

    length_ = next_token;
    exact_.assign((length_ + 1) * (length_ + 1), {});
    // Preorder visits an ancestor before its descendants, so each list comes
    // out root-to-leaf.
    for (std::size_t id = 0; id < nodes_.size(); ++id) exact_[slot(nodes_[id].span)].push_back(id);
}

std::span<const std::size_t> SpanIndex::covering(Span span) const {
    if (span.start >= span.end || span.end > length_) return {};
    return exact_[slot(span)];
}

std::optional<std::size_t> SpanIndex::highest(Span span) const {
    auto c = covering(span);
    if (c.empty()) return std::nullopt;
    return c.front();
}

}  // namespace treegraft
