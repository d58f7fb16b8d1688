#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "manurag/corpus.hpp"
#include "manurag/error.hpp"

namespace manurag {

using Embedding = std::vector<float>;
using ImageBytes = std::vector<uint8_t>;

/// One external model endpoint. `endpoint` is a base URL, or the literal
/// "offline" for the deterministic in-process reference providers.
struct ProviderConfig {
    std::string endpoint = "offline";
    std::string model_name;
    double timeout_seconds = 30.0;
    std::string api_key_env;
    double temperature = 0.0;
    size_t dim = 64;  // offline embedders only

    bool offline() const { return endpoint == "offline"; }
};

// ---------------------------------------------------------------------------
// Provider contracts
// ---------------------------------------------------------------------------

class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual Embedding embed(const std::string& text) = 0;
    virtual size_t dim() const = 0;
    virtual std::string model_name() const = 0;
};

/// Text and image embeddings sharing one space, for cross-modal search.
class MultiModalEmbedder {
public:
    virtual ~MultiModalEmbedder() = default;
    virtual Embedding embed_text(const std::string& text) = 0;
    virtual Embedding embed_image(const ImageBytes& image) = 0;
    virtual size_t dim() const = 0;
    virtual std::string model_name() const = 0;
};

/// Answer generator. An empty image list degrades to the text-only path.
class Generator {
public:
    virtual ~Generator() = default;
    virtual std::string generate(const std::string& prompt,
                                 const std::vector<ImageBytes>& images) = 0;
    virtual std::string model_name() const = 0;
};

class ImageDescriber {
public:
    virtual ~ImageDescriber() = default;
    virtual std::string describe(const ImageBytes& image, AssetKind kind) = 0;
    virtual std::string model_name() const = 0;
};

/// Claim decomposition and entailment, the backbone of factual
/// correctness and both context metrics.
class Judge {
public:
    virtual ~Judge() = default;
    virtual std::vector<std::string> decompose_claims(const std::string& text) = 0;
    virtual bool entails(const std::string& claim, const std::string& premise) = 0;
    virtual std::string model_name() const = 0;
};

class SimilarityScorer {
public:
    virtual ~SimilarityScorer() = default;
    virtual double score(const std::string& answer, const std::string& reference) = 0;
    virtual std::string model_name() const = 0;
};

// ---------------------------------------------------------------------------
// Offline reference providers
// ---------------------------------------------------------------------------

/// The offline embedding scheme, pinned bit-for-bit:
///   tokens   = lowercase whitespace tokens of `text`
///   for each token: h = FNV-1a-64(token); bucket = h mod dim;
///                   sign = -1 if bit 63 of h is set, else +1
///   vector   = sum of signed one-hot bucket contributions, L2-normalized
/// No tokens, or exact cancellation to the zero vector, is EmptyInput.
Embedding offline_hash_embedding(const std::string& text, size_t dim);

class OfflineTextEmbedder final : public TextEmbedder {
public:
    explicit OfflineTextEmbedder(size_t dim = 64, std::string model_name = "offline-text")
        : dim_(dim), model_(std::move(model_name)) {}

    Embedding embed(const std::string& text) override;
    size_t dim() const override { return dim_; }
    std::string model_name() const override { return model_; }

private:
    size_t dim_;
    std::string model_;
};

/// Per-asset sidecar descriptions (`assets/<uuid>.txt`), keyed by the
/// FNV-1a hash of the image file bytes. Gives the offline providers a
/// controllable stand-in for image semantics.
class SidecarCatalog {
public:
    SidecarCatalog() = default;
    static SidecarCatalog from_corpus(const Corpus& corpus);

    std::optional<std::string> lookup(const ImageBytes& image) const;
    void add(const ImageBytes& image, std::string description);

private:
    std::map<uint64_t, std::string> by_content_hash_;
};

/// Offline image embedding = hash embedding of the asset's sidecar text,
/// so an image and its description land on the same vector. Images with
/// no sidecar embed their content digest as a single token.
class OfflineMultiModalEmbedder final : public MultiModalEmbedder {
public:
    explicit OfflineMultiModalEmbedder(SidecarCatalog sidecars, size_t dim = 64,
                                       std::string model_name = "offline-mm")
        : sidecars_(std::move(sidecars)), dim_(dim), model_(std::move(model_name)) {}

    Embedding embed_text(const std::string& text) override;
    Embedding embed_image(const ImageBytes& image) override;
    size_t dim() const override { return dim_; }
    std::string model_name() const override { return model_; }

private:
    SidecarCatalog sidecars_;
    size_t dim_;
    std::string model_;
};

/// Canned answers, exact-match on the FNV-1a hash of the prompt.
/// Unknown prompts are FixtureMiss so silent drift cannot hide.
class OfflineGenerator final : public Generator {
public:
    explicit OfflineGenerator(std::string model_name = "offline-gen") : model_(std::move(model_name)) {}

    /// JSONL rows: {"prompt": "...", "answer": "..."} or
    /// {"prompt_hash": "<16 hex>", "answer": "..."}.
    static OfflineGenerator from_fixture_file(const std::filesystem::path& path);

    void add_fixture(const std::string& prompt, std::string answer);
    void add_fixture_hash(uint64_t prompt_hash, std::string answer);
    size_t fixture_count() const { return fixtures_.size(); }

    std::string generate(const std::string& prompt, const std::vector<ImageBytes>& images) override;
    std::string model_name() const override { return model_; }

private:
    std::map<uint64_t, std::string> fixtures_;
    std::string model_;
};

class OfflineImageDescriber final : public ImageDescriber {
public:
    explicit OfflineImageDescriber(SidecarCatalog sidecars, std::string model_name = "offline-describe")
        : sidecars_(std::move(sidecars)), model_(std::move(model_name)) {}

    std::string describe(const ImageBytes& image, AssetKind kind) override;
    std::string model_name() const override { return model_; }

private:
    SidecarCatalog sidecars_;
    std::string model_;
};

/// Deterministic NLI stand-in: claims split on '.'/';', entailment =
/// every content token of the claim occurs in the premise (case-folded,
/// surrounding punctuation stripped). A claim with no content tokens is
/// never entailed.
class OfflineJudge final : public Judge {
public:
    explicit OfflineJudge(std::string model_name = "offline-judge") : model_(std::move(model_name)) {}

    std::vector<std::string> decompose_claims(const std::string& text) override;
    bool entails(const std::string& claim, const std::string& premise) override;
    std::string model_name() const override { return model_; }

private:
    std::string model_;
};

/// Cosine of the offline hash embeddings, clamped to [0, 1].
class OfflineSimilarityScorer final : public SimilarityScorer {
public:
    explicit OfflineSimilarityScorer(size_t dim = 64, std::string model_name = "offline-scorer")
        : dim_(dim), model_(std::move(model_name)) {}

    double score(const std::string& answer, const std::string& reference) override;
    std::string model_name() const override { return model_; }

private:
    size_t dim_;
    std::string model_;
};

// ---------------------------------------------------------------------------
// Remote providers (wire contract: POST /invoke {task, model, input})
// ---------------------------------------------------------------------------

/// Transport shared by all remote providers. Response body must be
/// {"output": ...}; non-2xx is ProviderRejected (413 = ContextTooLarge),
/// connection failures are ProviderUnreachable.
class RemoteClient {
public:
    explicit RemoteClient(ProviderConfig config);
    ~RemoteClient();
    RemoteClient(RemoteClient&&) noexcept;
    RemoteClient& operator=(RemoteClient&&) noexcept;

    nlohmann::json invoke(const std::string& task, const nlohmann::json& input);
    const ProviderConfig& config() const { return config_; }

private:
    ProviderConfig config_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class RemoteTextEmbedder final : public TextEmbedder {
public:
    explicit RemoteTextEmbedder(ProviderConfig config) : client_(std::move(config)) {}
    Embedding embed(const std::string& text) override;
    size_t dim() const override { return dim_; }
    std::string model_name() const override { return client_.config().model_name; }

private:
    RemoteClient client_;
    size_t dim_ = 0;  // learned from the first response
};

class RemoteMultiModalEmbedder final : public MultiModalEmbedder {
public:
    explicit RemoteMultiModalEmbedder(ProviderConfig config) : client_(std::move(config)) {}
    Embedding embed_text(const std::string& text) override;
    Embedding embed_image(const ImageBytes& image) override;
    size_t dim() const override { return dim_; }
    std::string model_name() const override { return client_.config().model_name; }

private:
    Embedding check(Embedding v);
    RemoteClient client_;
    size_t dim_ = 0;
};

class RemoteGenerator final : public Generator {
public:
    explicit RemoteGenerator(ProviderConfig config) : client_(std::move(config)) {}
    std::string generate(const std::string& prompt, const std::vector<ImageBytes>& images) override;
    std::string model_name() const override { return client_.config().model_name; }

private:
    RemoteClient client_;
};

class RemoteImageDescriber final : public ImageDescriber {
public:
    explicit RemoteImageDescriber(ProviderConfig config) : client_(std::move(config)) {}
    std::string describe(const ImageBytes& image, AssetKind kind) override;
    std::string model_name() const override { return client_.config().model_name; }

private:
    RemoteClient client_;
};

class RemoteJudge final : public Judge {
public:
    explicit RemoteJudge(ProviderConfig config) : client_(std::move(config)) {}
    std::vector<std::string> decompose_claims(const std::string& text) override;
    bool entails(const std::string& claim, const std::string& premise) override;
    std::string model_name() const override { return client_.config().model_name; }

private:
    RemoteClient client_;
};

class RemoteSimilarityScorer final : public SimilarityScorer {
public:
    explicit RemoteSimilarityScorer(ProviderConfig config) : client_(std::move(config)) {}
    double score(const std::string& answer, const std::string& reference) override;
    std::string model_name() const override { return client_.config().model_name; }

private:
    RemoteClient client_;
};

// ---------------------------------------------------------------------------
// Description cache
// ---------------------------------------------------------------------------

/// uuid+model keyed description store so re-indexing never re-bills.
/// Single writer, many readers.
class DescriptionCache {
public:
    DescriptionCache() = default;

    void load(const std::filesystem::path& path);  // missing file = empty cache
    void save(const std::filesystem::path& path) const;

    std::optional<std::string> get(const Uuid& uuid, const std::string& model) const;
    void put(const Uuid& uuid, const std::string& model, std::string text);
    size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::string> entries_;
};

/// ImageDescriber wrapper consulting the cache first; counts how many
/// calls actually reached the inner provider.
class CachedDescriber {
public:
    CachedDescriber(std::shared_ptr<ImageDescriber> inner, std::shared_ptr<DescriptionCache> cache)
        : inner_(std::move(inner)), cache_(std::move(cache)) {}

    std::string describe(const Uuid& uuid, const ImageBytes& image, AssetKind kind);
    uint64_t provider_calls() const { return provider_calls_.load(); }
    std::string model_name() const { return inner_->model_name(); }
    const std::shared_ptr<DescriptionCache>& cache() const { return cache_; }

private:
    std::shared_ptr<ImageDescriber> inner_;
    std::shared_ptr<DescriptionCache> cache_;
    std::atomic<uint64_t> provider_calls_{0};
};

// ---------------------------------------------------------------------------
// Provider bundle
// ---------------------------------------------------------------------------

struct ProviderSet {
    std::shared_ptr<TextEmbedder> text_embedder;
    std::shared_ptr<MultiModalEmbedder> mm_embedder;  // Manu1/Manu3 only
    std::shared_ptr<Generator> generator;
    std::shared_ptr<CachedDescriber> describer;  // Manu4 only
    std::shared_ptr<Judge> judge;
    std::shared_ptr<SimilarityScorer> scorer;

    /// Model names per role, for build manifests and serialized configs.
    nlohmann::json describe_models() const;
};

}  // namespace manurag
