#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <limits>
#include <map>
#include <random>

#include "manurag/vector_store.hpp"
#include "support/oracles.hpp"
#include "support/test_support.hpp"

using namespace manurag;
namespace mt = manurag::testing;

namespace {

Chunk chunk_payload(size_t i) {
    Chunk c;
    c.doc_id = "p";
    c.start = i;
    c.token_count = 1;
    c.text = "t" + std::to_string(i);
    return c;
}

Embedding random_vector(std::mt19937_64& rng, size_t dim) {
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    Embedding v(dim);
    for (auto& x : v) x = dist(rng);
    v[0] += v[0] >= 0 ? 0.25f : -0.25f;  // keep away from the zero vector
    return v;
}

std::string padded_id(size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "e%06zu", i);
    return buf;
}

}  // namespace

TEST_CASE("cosine identities and the hand-computed value") {
    Embedding v{0.3f, -0.7f, 0.2f};
    CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(cosine({1.0f, 0.0f}, {0.0f, 1.0f}) == 0.0);
    // (1,2,3)·(4,5,6) = 32, norms sqrt(14) and sqrt(77)
    CHECK(cosine({1.0f, 2.0f, 3.0f}, {4.0f, 5.0f, 6.0f}) ==
          doctest::Approx(0.974631846).epsilon(1e-8));
    CHECK(cosine({1.0f, 2.0f}, {2.0f, 1.0f}) == cosine({2.0f, 1.0f}, {1.0f, 2.0f}));
    CHECK_THROWS_AS(cosine({1.0f}, {1.0f, 2.0f}), Error);
    CHECK_THROWS_AS(cosine({0.0f, 0.0f}, {1.0f, 2.0f}), Error);
}

TEST_CASE("insert guards dim, duplicates, and degenerate vectors") {
    TextVectorStore store(3);
    store.insert("a", {1.0f, 0.0f, 0.0f}, chunk_payload(0));
    CHECK_THROWS_AS(store.insert("a", {0.0f, 1.0f, 0.0f}, chunk_payload(1)), Error);
    CHECK_THROWS_AS(store.insert("b", {1.0f, 0.0f}, chunk_payload(2)), Error);
    CHECK_THROWS_AS(store.insert("c", {0.0f, 0.0f, 0.0f}, chunk_payload(3)), Error);
    const float inf = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(store.insert("d", {inf, 0.0f, 0.0f}, chunk_payload(4)), Error);
}

TEST_CASE("top_k basics") {
    TextVectorStore store(2);
    store.insert("x", {1.0f, 0.0f}, chunk_payload(0));
    store.insert("y", {0.0f, 1.0f}, chunk_payload(1));
    store.insert("z", {1.0f, 1.0f}, chunk_payload(2));

    SUBCASE("k at least store size returns everything sorted") {
        auto hits = store.top_k({1.0f, 0.0f}, 10);
        REQUIRE(hits.size() == 3);
        CHECK(hits[0].id == "x");
        CHECK(hits[0].score == doctest::Approx(1.0));
        CHECK(hits[1].id == "z");
        CHECK(hits[2].id == "y");
    }

    SUBCASE("exact-match entry wins at k=1") {
        auto hits = store.top_k({0.0f, 1.0f}, 1);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].id == "y");
        CHECK(hits[0].score == doctest::Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(store.top_k({1.0f, 0.0f, 0.0f}, 1), Error);
        TextVectorStore empty_store(2);
        CHECK_THROWS_AS(empty_store.top_k({1.0f, 0.0f}, 1), Error);
    }

    SUBCASE("query counter observable") {
        CHECK(store.query_count() == 0);
        (void)store.top_k({1.0f, 0.0f}, 1);
        CHECK(store.query_count() == 1);
    }
}

TEST_CASE("equal scores break ties by ascending id") {
    TextVectorStore store(2);
    store.insert("bb", {1.0f, 0.0f}, chunk_payload(0));
    store.insert("aa", {1.0f, 0.0f}, chunk_payload(1));
    store.insert("cc", {1.0f, 0.0f}, chunk_payload(2));
    auto hits = store.top_k({1.0f, 0.0f}, 3);
    CHECK(hits[0].id == "aa");
    CHECK(hits[1].id == "bb");
    CHECK(hits[2].id == "cc");
}

TEST_CASE("200 random vectors, k=7: identical ids, order, and scores as the oracle") {
    std::mt19937_64 rng(42);
    const size_t dim = 24;
    TextVectorStore store(dim);
    std::vector<std::string> ids;
    std::vector<Embedding> vectors;
    for (size_t i = 0; i < 200; ++i) {
        auto v = random_vector(rng, dim);
        ids.push_back(padded_id(i));
        vectors.push_back(v);
        store.insert(ids.back(), v, chunk_payload(i));
    }
    for (int trial = 0; trial < 25; ++trial) {
        auto query = random_vector(rng, dim);
        auto got = store.top_k(query, 7);
        auto expected = mt::top_k_oracle(query, ids, vectors, 7);
        REQUIRE(got.size() == expected.size());
        for (size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].id == expected[i].id);
            CHECK(got[i].score == expected[i].score);
        }
    }
}

TEST_CASE("appending an entry never changes existing hit scores") {
    std::mt19937_64 rng(99);
    const size_t dim = 8;
    TextVectorStore store(dim);
    for (size_t i = 0; i < 50; ++i) {
        store.insert(padded_id(i), random_vector(rng, dim), chunk_payload(i));
    }
    auto query = random_vector(rng, dim);
    auto before = store.top_k(query, 50);
    store.insert("zzz-new", random_vector(rng, dim), chunk_payload(999));
    auto after = store.top_k(query, 51);
    std::map<std::string, double> after_scores;
    for (const auto& h : after) after_scores[h.id] = h.score;
    for (const auto& h : before) {
        REQUIRE(after_scores.count(h.id) == 1);
        CHECK(after_scores[h.id] == h.score);
    }
}

TEST_CASE("referenced_images ordering and dedup") {
    auto u1 = *Uuid::parse("11111111-1111-4111-8111-111111111111");
    auto u2 = *Uuid::parse("22222222-2222-4222-8222-222222222222");
    auto u3 = *Uuid::parse("33333333-3333-4333-8333-333333333333");

    TextVectorStore store(2);
    Chunk c0 = chunk_payload(0);
    c0.images = {u2, u1};
    Chunk c1 = chunk_payload(1);
    c1.images = {u1, u3};
    Chunk c2 = chunk_payload(2);  // no images
    store.insert("h1", {1.0f, 0.0f}, c0);
    store.insert("h2", {0.0f, 1.0f}, c1);
    store.insert("h3", {1.0f, 1.0f}, c2);

    SUBCASE("empty alpha everywhere") {
        std::vector<ScoredHit> hits{{"h3", 1.0, 2}};
        CHECK(referenced_images(hits, store).empty());
    }

    SUBCASE("rank order then in-chunk order, dedup") {
        std::vector<ScoredHit> hits{{"h1", 0.9, 0}, {"h2", 0.8, 1}};
        auto uuids = referenced_images(hits, store);
        REQUIRE(uuids.size() == 3);
        CHECK(uuids[0] == u2);
        CHECK(uuids[1] == u1);
        CHECK(uuids[2] == u3);
    }

    SUBCASE("hand trace with ranks swapped") {
        std::vector<ScoredHit> hits{{"h2", 0.9, 1}, {"h1", 0.8, 0}};
        auto uuids = referenced_images(hits, store);
        REQUIRE(uuids.size() == 3);
        CHECK(uuids[0] == u1);
        CHECK(uuids[1] == u3);
        CHECK(uuids[2] == u2);
    }
}

TEST_CASE("save/load: empty store round-trips") {
    auto dir = mt::make_temp_dir("vs_empty");
    TextVectorStore store(16);
    store.save(dir / "text.idx");
    auto loaded = TextVectorStore::load(dir / "text.idx");
    CHECK(loaded.dim() == 16);
    CHECK(loaded.empty());
    CHECK(loaded == store);
    std::filesystem::remove_all(dir);
}

TEST_CASE("save/load: 1000 random entries round-trip bit-exactly") {
    std::mt19937_64 rng(7);
    const size_t dim = 32;
    auto dir = mt::make_temp_dir("vs_big");
    TextVectorStore store(dim);
    for (size_t i = 0; i < 1000; ++i) {
        Chunk payload = chunk_payload(i);
        if (i % 3 == 0) {
            payload.images = {*Uuid::parse("11111111-1111-4111-8111-111111111111")};
        }
        store.insert(padded_id(i), random_vector(rng, dim), payload);
    }
    store.save(dir / "a.idx");
    auto loaded = TextVectorStore::load(dir / "a.idx");
    CHECK(loaded == store);

    // bit-exactness at the file level: a second save is byte-identical
    loaded.save(dir / "b.idx");
    CHECK(util::read_file_bytes(dir / "a.idx") == util::read_file_bytes(dir / "b.idx"));
    CHECK(util::read_file_bytes(dir / "a.idx.catalog.jsonl") ==
          util::read_file_bytes(dir / "b.idx.catalog.jsonl"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("image store round-trips asset payloads") {
    auto dir = mt::make_temp_dir("vs_img");
    ImageVectorStore store(4);
    ImageAsset asset;
    asset.uuid = *Uuid::parse("44444444-4444-4444-8444-444444444444");
    asset.kind = AssetKind::Table;
    asset.path = "assets/x.png";
    asset.caption = "a caption";
    asset.source_page = 7;
    store.insert(asset.uuid.to_string(), {0.5f, 0.5f, 0.0f, 0.0f}, asset);
    store.save(dir / "image.idx");
    auto loaded = ImageVectorStore::load(dir / "image.idx");
    REQUIRE(loaded.size() == 1);
    CHECK(loaded.entry(0).payload == asset);
    std::filesystem::remove_all(dir);
}

TEST_CASE("corruption is detected") {
    auto dir = mt::make_temp_dir("vs_corrupt");
    TextVectorStore store(8);
    std::mt19937_64 rng(3);
    for (size_t i = 0; i < 20; ++i) {
        store.insert(padded_id(i), random_vector(rng, 8), chunk_payload(i));
    }
    store.save(dir / "text.idx");

    SUBCASE("truncated file") {
        auto bytes = util::read_file_bytes(dir / "text.idx");
        util::write_file_bytes(dir / "text.idx", bytes.data(), bytes.size() - 13);
        try {
            (void)TextVectorStore::load(dir / "text.idx");
            FAIL("expected CorruptIndex");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::CorruptIndex);
        }
    }

    SUBCASE("flipped record byte fails the checksum") {
        auto bytes = util::read_file_bytes(dir / "text.idx");
        bytes[bytes.size() - 1] ^= 0x40;
        util::write_file_bytes(dir / "text.idx", bytes.data(), bytes.size());
        try {
            (void)TextVectorStore::load(dir / "text.idx");
            FAIL("expected CorruptIndex");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::CorruptIndex);
            CHECK(std::string(e.what()).find("checksum") != std::string::npos);
        }
    }

    SUBCASE("bad magic") {
        auto bytes = util::read_file_bytes(dir / "text.idx");
        bytes[0] = 'X';
        util::write_file_bytes(dir / "text.idx", bytes.data(), bytes.size());
        CHECK_THROWS_AS((void)TextVectorStore::load(dir / "text.idx"), Error);
    }

    SUBCASE("missing catalog sidecar") {
        std::filesystem::remove(dir / "text.idx.catalog.jsonl");
        CHECK_THROWS_AS((void)TextVectorStore::load(dir / "text.idx"), Error);
    }
    std::filesystem::remove_all(dir);
}
