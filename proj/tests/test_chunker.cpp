#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "manurag/chunker.hpp"
#include "manurag/error.hpp"
#include "support/oracles.hpp"
#include "support/test_support.hpp"

using namespace manurag;
namespace mt = manurag::testing;

namespace {

std::vector<std::string> dummy_tokens(size_t n) {
    std::vector<std::string> tokens;
    tokens.reserve(n);
    for (size_t i = 0; i < n; ++i) tokens.push_back("t" + std::to_string(i));
    return tokens;
}

std::vector<std::pair<size_t, size_t>> ranges_of(const std::vector<Chunk>& chunks) {
    std::vector<std::pair<size_t, size_t>> out;
    for (const auto& c : chunks) out.emplace_back(c.start, c.start + c.token_count);
    return out;
}

}  // namespace

TEST_CASE("tokenize basics") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("a  b\nc") == std::vector<std::string>{"a", "b", "c"});
    CHECK(tokenize("  leading and trailing  ") ==
          std::vector<std::string>{"leading", "and", "trailing"});
}

TEST_CASE("tokenize keeps links atomic") {
    const std::string link = "![figure](uuid://11111111-1111-4111-8111-111111111111)";
    CHECK(tokenize("see " + link + " here") == std::vector<std::string>{"see", link, "here"});
    // glued to surrounding text the link still comes out as one token
    CHECK(tokenize("see" + link + "here") == std::vector<std::string>{"see", link, "here"});
}

TEST_CASE("chunk windows match the worked example") {
    // 10 tokens, size 4, overlap 2 -> [0,6) [4,10) [8,10)
    auto chunks = chunk(dummy_tokens(10), "doc", ChunkingParams{4, 2});
    CHECK(ranges_of(chunks) ==
          std::vector<std::pair<size_t, size_t>>{{0, 6}, {4, 10}, {8, 10}});
    CHECK(chunks[0].id() == "doc#00000000");
    CHECK(chunks[1].id() == "doc#00000004");
}

TEST_CASE("short input is a single chunk, empty input none") {
    auto one = chunk(dummy_tokens(5), "doc", ChunkingParams{600, 100});
    REQUIRE(one.size() == 1);
    CHECK(one[0].token_count == 5);
    CHECK(chunk({}, "doc", ChunkingParams{600, 100}).empty());
}

TEST_CASE("invalid params are rejected") {
    CHECK_FALSE(ChunkingParams{0, 0}.valid());
    CHECK_FALSE(ChunkingParams{4, 4}.valid());
    CHECK(ChunkingParams{4, 3}.valid());
    CHECK_THROWS_AS(chunk(dummy_tokens(3), "doc", ChunkingParams{4, 4}), Error);
}

TEST_CASE("window oracle agreement over random shapes") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 1000; ++trial) {
        size_t n = rng() % 5001;
        size_t S = 1 + rng() % 700;
        size_t O = rng() % S;
        auto got = ranges_of(chunk(dummy_tokens(n), "d", ChunkingParams{S, O}));
        auto expected = mt::window_oracle(n, S, O);
        REQUIRE(got == expected);
    }
}

TEST_CASE("coverage and overlap properties") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        size_t n = 1 + rng() % 800;
        size_t S = 1 + rng() % 100;
        size_t O = rng() % S;
        auto chunks = chunk(dummy_tokens(n), "d", ChunkingParams{S, O});
        std::vector<bool> covered(n, false);
        for (const auto& c : chunks) {
            for (size_t j = c.start; j < c.start + c.token_count; ++j) covered[j] = true;
        }
        CHECK(std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }));
        for (size_t i = 0; i + 1 < chunks.size(); ++i) {
            size_t this_end = chunks[i].start + chunks[i].token_count;
            size_t next_start = chunks[i + 1].start;
            size_t shared = this_end > next_start ? this_end - next_start : 0;
            size_t remaining = n - next_start;
            CHECK(shared == std::min(O, remaining));
        }
    }
}

TEST_CASE("chunk text detokenizes and carries its links") {
    const std::string link = "![figure](uuid://11111111-1111-4111-8111-111111111111)";
    auto chunks = chunk(tokenize("alpha beta " + link + " gamma"), "doc", ChunkingParams{10, 2});
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].text == "alpha beta " + link + " gamma");
    REQUIRE(chunks[0].images.size() == 1);
    CHECK(chunks[0].images[0] == *Uuid::parse("11111111-1111-4111-8111-111111111111"));
}

TEST_CASE("attach_images validates against the catalog") {
    auto corpus = load_corpus(mt::fixture_corpus_dir());

    SUBCASE("no links means empty image set") {
        auto chunks = chunk(tokenize("plain words only"), "machining", ChunkingParams{8, 2});
        auto attached = attach_images(chunks[0], corpus);
        CHECK(attached.images.empty());
    }

    SUBCASE("duplicate links dedup in order") {
        const std::string u1 = "![figure](uuid://11111111-1111-4111-8111-111111111111)";
        const std::string u2 = "![table](uuid://22222222-2222-4222-8222-222222222222)";
        auto chunks =
            chunk(tokenize(u1 + " x " + u2 + " y " + u1), "machining", ChunkingParams{20, 4});
        auto attached = attach_images(chunks[0], corpus);
        REQUIRE(attached.images.size() == 2);
        CHECK(attached.images[0].to_string() == "11111111-1111-4111-8111-111111111111");
        CHECK(attached.images[1].to_string() == "22222222-2222-4222-8222-222222222222");
    }

    SUBCASE("unknown uuid is MissingAsset") {
        auto chunks = chunk(tokenize("x ![figure](uuid://99999999-9999-4999-8999-999999999999)"),
                            "machining", ChunkingParams{8, 2});
        CHECK_THROWS_AS(attach_images(chunks[0], corpus), Error);
    }
}

TEST_CASE("a link in the overlap region lands in both chunks") {
    // S=4 O=2: link token at index 5 sits in [4,6) = the overlap of chunk 0,
    // and inside chunk 1's window [4,10).
    const std::string link = "![figure](uuid://11111111-1111-4111-8111-111111111111)";
    std::vector<std::string> tokens = {"t0", "t1", "t2", "t3", "t4", link, "t6", "t7", "t8", "t9"};
    auto chunks = chunk(tokens, "doc", ChunkingParams{4, 2});
    REQUIRE(chunks.size() == 3);
    REQUIRE(chunks[0].images.size() == 1);
    REQUIRE(chunks[1].images.size() == 1);
    CHECK(chunks[0].images[0] == chunks[1].images[0]);
    CHECK(chunks[2].images.empty());
}

TEST_CASE("alpha union over chunks equals whole-document links") {
    auto corpus = load_corpus(mt::fixture_corpus_dir());
    for (const auto& doc : corpus.documents) {
        for (size_t S : {5, 17, 64}) {
            auto chunks = chunk(tokenize(doc.body), doc.doc_id, ChunkingParams{S, S / 3});
            std::vector<Uuid> unioned;
            std::set<Uuid> seen;
            for (const auto& c : chunks) {
                for (const auto& u : c.images) {
                    if (seen.insert(u).second) unioned.push_back(u);
                }
            }
            auto whole = extract_links(doc.body);
            CHECK(std::set<Uuid>(unioned.begin(), unioned.end()) ==
                  std::set<Uuid>(whole.begin(), whole.end()));
        }
    }
}

TEST_CASE("find_links reports spans usable for rewriting") {
    const std::string body = "pre ![figure](uuid://11111111-1111-4111-8111-111111111111) post";
    auto spans = find_links(body);
    REQUIRE(spans.size() == 1);
    CHECK(body.substr(spans[0].offset, spans[0].length) ==
          "![figure](uuid://11111111-1111-4111-8111-111111111111)");
}
