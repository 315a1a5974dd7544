#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "treegraft/corpus.hpp"
#include "treegraft/error.hpp"

using namespace treegraft;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("treegraft_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string& file, const std::string& content) const {
        std::ofstream(path / file) << content;
        return (path / file).string();
    }
};

BitextPaths toy_paths() {
    return {TREEGRAFT_TOY_DIR "/train.src", TREEGRAFT_TOY_DIR "/train.tgt", TREEGRAFT_TOY_DIR "/train.align",
            TREEGRAFT_TOY_DIR "/train.trees"};
}

}  // namespace

TEST_CASE("split tokens") {
    CHECK(split_tokens("  a  b\tc ") == Tokens{"a", "b", "c"});
    CHECK(split_tokens("").empty());
}

TEST_CASE("parse alignment") {
    using Links = decltype(Alignment::links);
    CHECK(parse_alignment("0-0 1-1", 2, 2).links == Links{{0, 0}, {1, 1}});
    CHECK(parse_alignment("", 3, 3).links.empty());
    CHECK(parse_alignment("0-0 0-0 1-0", 2, 1).links == Links{{0, 0}, {1, 0}});
    CHECK(parse_alignment("1-0 0-1", 2, 2).links == Links{{0, 1}, {1, 0}});
    CHECK_THROWS_AS(parse_alignment("2-0", 2, 2), Error);
    CHECK_THROWS_AS(parse_alignment("0-2", 2, 2), Error);
    CHECK_THROWS_AS(parse_alignment("0_1", 2, 2), Error);
    CHECK_THROWS_AS(parse_alignment("0-", 2, 2), Error);
    CHECK_THROWS_AS(parse_alignment("-1-0", 2, 2), Error);
    CHECK(format_alignment(parse_alignment("1-0 0-1", 2, 2)) == "0-1 1-0");
}

TEST_CASE("toy bitext loads completely") {
    std::vector<SkippedPair> skipped;
    auto pairs = load_bitext(toy_paths(), &skipped);
    CHECK(pairs.size() == 50);
    CHECK(skipped.empty());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        CHECK(pairs[i].id == i);
        REQUIRE(pairs[i].target_tree.has_value());
        CHECK(yield_tokens(*pairs[i].target_tree) == pairs[i].target);
    }
}

TEST_CASE("bad lines are skipped with a reason") {
    TempDir dir("skips");
    std::string src, tgt, align, trees;
    for (int i = 0; i < 9; ++i) {
        src += "a b\n";
        tgt += "x y\n";
        align += i == 1 ? "0-5\n" : "0-0 1-1\n";
        trees += i == 3 ? "\n" : i == 7 ? "(S (NP x) (VP z))\n" : "(S (NP x) (VP y))\n";
    }
    BitextPaths paths{dir.write("s", src), dir.write("t", tgt), dir.write("a", align), dir.write("tr", trees)};
    BitextReader reader(paths);
    CHECK(reader.lines() == 9);
    std::vector<std::size_t> ids;
    while (auto p = reader.next()) ids.push_back(p->id);
    CHECK(ids == std::vector<std::size_t>{0, 2, 4, 5, 6, 8});
    REQUIRE(reader.skipped().size() == 3);
    CHECK(reader.skipped()[0].id == 1);
    CHECK(reader.skipped()[0].reason.rfind("bad alignment", 0) == 0);
    CHECK(reader.skipped()[1].id == 3);
    CHECK(reader.skipped()[1].reason == "no parse");
    CHECK(reader.skipped()[2].id == 7);
    CHECK(reader.skipped()[2].reason == "yield mismatch");
}

TEST_CASE("line count mismatch and empty files") {
    TempDir dir("mismatch");
    BitextPaths bad{dir.write("s", "a\nb\n"), dir.write("t", "x\n"), dir.write("a", "0-0\n0-0\n"), ""};
    CHECK_THROWS_AS(BitextReader{bad}, Error);
    BitextPaths empty{dir.write("s0", ""), dir.write("t0", ""), dir.write("a0", ""), ""};
    CHECK(load_bitext(empty).empty());
    BitextPaths missing{(dir.path / "nope").string(), dir.write("t1", ""), dir.write("a1", ""), ""};
    CHECK_THROWS_AS(BitextReader{missing}, Error);
}

TEST_CASE("corpus stats") {
    SentencePair p;
    p.source = {"a", "b"};
    p.target = {"x"};
    auto s = corpus_stats({p});
    CHECK(s.lines == 1);
    CHECK(s.source_tokens == 2);
    CHECK(s.target_tokens == 1);
    CHECK(s.source_types == 2);
    CHECK(s.target_types == 1);

    auto d = corpus_stats({p, p});
    CHECK(d.source_tokens == 4);
    CHECK(d.source_types == 2);
    CHECK(d.target_types == 1);

    // toy corpus against an independent count of the raw files
    auto toy = corpus_stats(load_bitext(toy_paths()));
    auto count = [](const char* path) {
        std::ifstream in(path);
        std::size_t tokens = 0;
        std::set<std::string> types;
        for (std::string w; in >> w;) {
            ++tokens;
            types.insert(w);
        }
        return std::make_pair(tokens, types.size());
    };
    auto [st, sy] = count(TREEGRAFT_TOY_DIR "/train.src");
    auto [tt, ty] = count(TREEGRAFT_TOY_DIR "/train.tgt");
    CHECK(toy.lines == 50);
    CHECK(st == 173);
    CHECK(sy == 48);
    CHECK(tt == 179);
    CHECK(ty == 45);
    CHECK(toy.source_tokens == st);
    CHECK(toy.source_types == sy);
    CHECK(toy.target_tokens == tt);
    CHECK(toy.target_types == ty);
}
