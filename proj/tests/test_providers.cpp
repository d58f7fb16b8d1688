#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "manurag/providers.hpp"
#include "manurag/util.hpp"
#include "manurag/vector_store.hpp"
#include "support/oracles.hpp"
#include "support/test_support.hpp"

using namespace manurag;
namespace mt = manurag::testing;

namespace {

/// Independent reconstruction of the pinned embedding scheme.
std::vector<float> expected_embedding(const std::vector<std::string>& lowercase_tokens,
                                      size_t dim) {
    std::vector<float> v(dim, 0.0f);
    for (const auto& token : lowercase_tokens) {
        uint64_t h = mt::oracle_fnv1a64(token);
        v[h % dim] += (h >> 63) ? -1.0f : 1.0f;
    }
    double norm = 0.0;
    for (float x : v) norm += static_cast<double>(x) * x;
    norm = std::sqrt(norm);
    for (float& x : v) x = static_cast<float>(x / norm);
    return v;
}

}  // namespace

TEST_CASE("offline text embedding is deterministic and unit length") {
    OfflineTextEmbedder embedder(64);
    auto a = embedder.embed("surface roughness of a ground part");
    auto b = embedder.embed("surface roughness of a ground part");
    CHECK(a == b);
    double norm = 0.0;
    for (float x : a) norm += static_cast<double>(x) * x;
    CHECK(std::abs(norm - 1.0) < 1e-6);
}

TEST_CASE("offline embedding of empty input fails") {
    OfflineTextEmbedder embedder(64);
    CHECK_THROWS_AS(embedder.embed(""), Error);
    CHECK_THROWS_AS(embedder.embed("   \t\n "), Error);
}

TEST_CASE("hand-recomputed projection for a two-token input") {
    // "milling speed" at dim 64: fnv("milling") lands in bucket 53 with the
    // sign bit set, fnv("speed") in bucket 0 without it.
    OfflineTextEmbedder embedder(64);
    auto got = embedder.embed("milling speed");
    auto expected = expected_embedding({"milling", "speed"}, 64);
    REQUIRE(got.size() == expected.size());
    for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == expected[i]);
    CHECK(got[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(got[53] == doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("case folding merges tokens before hashing") {
    OfflineTextEmbedder embedder(64);
    CHECK(embedder.embed("Milling SPEED") == embedder.embed("milling speed"));
}

TEST_CASE("multi-modal: image embeds as its sidecar text") {
    ImageBytes gear_bytes{'g', 'e', 'a', 'r', '-', 'p', 'n', 'g'};
    SidecarCatalog sidecars;
    sidecars.add(gear_bytes, "gear");
    OfflineMultiModalEmbedder mm(sidecars, 64);

    auto from_text = mm.embed_text("gear");
    auto from_image = mm.embed_image(gear_bytes);
    CHECK(from_text == from_image);
    CHECK(cosine(from_text, from_image) == doctest::Approx(1.0).epsilon(1e-6));

    CHECK(mm.embed_image(gear_bytes) == mm.embed_image(gear_bytes));
    CHECK_THROWS_AS(mm.embed_image(ImageBytes{}), Error);
}

TEST_CASE("multi-modal: image without sidecar still embeds deterministically") {
    OfflineMultiModalEmbedder mm(SidecarCatalog{}, 64);
    ImageBytes mystery{'x', 'y', 'z'};
    CHECK(mm.embed_image(mystery) == mm.embed_image(mystery));
}

TEST_CASE("offline generator: fixture hit, fixture miss") {
    OfflineGenerator gen;
    gen.add_fixture("prompt P", "canned answer");
    CHECK(gen.generate("prompt P", {}) == "canned answer");
    try {
        gen.generate("unknown prompt", {});
        FAIL("expected FixtureMiss");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FixtureMiss);
    }
}

TEST_CASE("offline generator fixture file round trip") {
    auto dir = mt::make_temp_dir("genfix");
    nlohmann::json row1{{"prompt", "what is brass"}, {"answer", "an alloy"}};
    nlohmann::json row2{{"prompt_hash", util::to_hex(util::fnv1a64("hashed prompt"))},
                        {"answer", "from hash"}};
    util::write_file_text(dir / "fix.jsonl", row1.dump() + "\n" + row2.dump() + "\n");
    auto gen = OfflineGenerator::from_fixture_file(dir / "fix.jsonl");
    CHECK(gen.fixture_count() == 2);
    CHECK(gen.generate("what is brass", {}) == "an alloy");
    CHECK(gen.generate("hashed prompt", {}) == "from hash");
    std::filesystem::remove_all(dir);
}

TEST_CASE("offline describer returns sidecar text verbatim") {
    ImageBytes bytes{'i', 'm', 'g'};
    SidecarCatalog sidecars;
    sidecars.add(bytes, "Table 4.1: thermal expansion coefficients");
    OfflineImageDescriber describer(sidecars);
    CHECK(describer.describe(bytes, AssetKind::Table) ==
          "Table 4.1: thermal expansion coefficients");
    CHECK_THROWS_AS(describer.describe(ImageBytes{}, AssetKind::Table), Error);
    CHECK_THROWS_AS(describer.describe(ImageBytes{'n', 'o'}, AssetKind::Figure), Error);
}

TEST_CASE("cached describer calls the provider once per uuid") {
    ImageBytes bytes{'i', 'm', 'g'};
    SidecarCatalog sidecars;
    sidecars.add(bytes, "described");
    CachedDescriber cached(std::make_shared<OfflineImageDescriber>(sidecars),
                           std::make_shared<DescriptionCache>());
    auto uuid = *Uuid::parse("11111111-1111-4111-8111-111111111111");
    CHECK(cached.describe(uuid, bytes, AssetKind::Figure) == "described");
    CHECK(cached.provider_calls() == 1);
    CHECK(cached.describe(uuid, bytes, AssetKind::Figure) == "described");
    CHECK(cached.provider_calls() == 1);
}

TEST_CASE("description cache persists across instances") {
    auto dir = mt::make_temp_dir("desccache");
    auto path = dir / "cache.json";
    {
        DescriptionCache cache;
        cache.put(*Uuid::parse("11111111-1111-4111-8111-111111111111"), "model-x", "stored text");
        cache.save(path);
    }
    DescriptionCache loaded;
    loaded.load(path);
    CHECK(loaded.size() == 1);
    auto got = loaded.get(*Uuid::parse("11111111-1111-4111-8111-111111111111"), "model-x");
    REQUIRE(got.has_value());
    CHECK(*got == "stored text");
    CHECK_FALSE(loaded.get(*Uuid::parse("11111111-1111-4111-8111-111111111111"), "model-y"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("offline judge decomposes on periods and semicolons") {
    OfflineJudge judge;
    CHECK(judge.decompose_claims("A is B. C is D.") ==
          std::vector<std::string>{"A is B", "C is D"});
    CHECK(judge.decompose_claims("one; two. three") ==
          std::vector<std::string>{"one", "two", "three"});
    CHECK(judge.decompose_claims("...").empty());
    CHECK_THROWS_AS(judge.decompose_claims(""), Error);
}

TEST_CASE("offline judge entailment is token containment") {
    OfflineJudge judge;
    CHECK(judge.entails("steel expands", "steel expands when heated"));
    CHECK_FALSE(judge.entails("aluminum melts", "steel expands"));
    CHECK(judge.entails("Steel EXPANDS", "steel expands"));  // case folded
    CHECK(judge.entails("steel expands.", "heated steel expands"));  // punctuation stripped
    CHECK_FALSE(judge.entails("...", "anything"));  // no content tokens
}

TEST_CASE("offline scorer: identical 1.0, disjoint buckets 0.0") {
    OfflineSimilarityScorer scorer(64);
    CHECK(scorer.score("porosity comes from gas", "porosity comes from gas") ==
          doctest::Approx(1.0).epsilon(1e-6));

    // bucket sets verified disjoint at dim 64 before asserting exact zero
    const std::string a = "aluminum melts quickly";
    const std::string b = "steel expands when heated";
    std::set<uint64_t> buckets_a, buckets_b;
    for (const auto& t : util::split_whitespace(a)) buckets_a.insert(mt::oracle_fnv1a64(t) % 64);
    for (const auto& t : util::split_whitespace(b)) buckets_b.insert(mt::oracle_fnv1a64(t) % 64);
    for (uint64_t bucket : buckets_a) REQUIRE(!buckets_b.contains(bucket));

    CHECK(scorer.score(a, b) == 0.0);
    CHECK_THROWS_AS(scorer.score("", "x"), Error);
}

TEST_CASE("sidecar catalog built from the fixture corpus") {
    auto corpus = load_corpus(mt::fixture_corpus_dir());
    auto sidecars = SidecarCatalog::from_corpus(corpus);
    auto bytes = util::read_file_bytes(mt::fixture_corpus_dir() /
                                       "assets/33333333-3333-4333-8333-333333333333.png");
    auto description = sidecars.lookup(bytes);
    REQUIRE(description.has_value());
    CHECK(*description == "Diagram of milling machine axes and spindle orientation.");
}
