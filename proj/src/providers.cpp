#include "manurag/providers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>

#include "manurag/util.hpp"

namespace manurag {

Embedding offline_hash_embedding(const std::string& text, size_t dim) {
    if (dim == 0) throw Error(ErrorKind::DimMismatch, "embedding dim must be positive");
    auto tokens = util::split_whitespace(text);
    if (tokens.empty()) throw Error(ErrorKind::EmptyInput, "no tokens to embed");
    Embedding v(dim, 0.0f);
    for (const auto& token : tokens) {
        uint64_t h = util::fnv1a64(util::lowercase(token));
        size_t bucket = static_cast<size_t>(h % dim);
        float sign = (h >> 63) ? -1.0f : 1.0f;
        v[bucket] += sign;
    }
    double norm_sq = 0.0;
    for (float x : v) norm_sq += static_cast<double>(x) * x;
    if (norm_sq == 0.0) throw Error(ErrorKind::EmptyInput, "tokens cancelled to the zero vector");
    const float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
    for (float& x : v) x *= inv;
    return v;
}

Embedding OfflineTextEmbedder::embed(const std::string& text) {
    return offline_hash_embedding(text, dim_);
}

SidecarCatalog SidecarCatalog::from_corpus(const Corpus& corpus) {
    SidecarCatalog catalog;
    for (const auto& doc : corpus.documents) {
        for (const auto& asset : doc.assets) {
            auto bytes = util::read_file_bytes(corpus.root / asset.path);
            auto sidecar = corpus.root / "assets" / (asset.uuid.to_string() + ".txt");
            if (std::filesystem::exists(sidecar)) {
                catalog.add(bytes, util::read_file_text(sidecar));
            }
        }
    }
    return catalog;
}

std::optional<std::string> SidecarCatalog::lookup(const ImageBytes& image) const {
    auto it = by_content_hash_.find(util::fnv1a64(image));
    if (it == by_content_hash_.end()) return std::nullopt;
    return it->second;
}

void SidecarCatalog::add(const ImageBytes& image, std::string description) {
    by_content_hash_[util::fnv1a64(image)] = std::move(description);
}

Embedding OfflineMultiModalEmbedder::embed_text(const std::string& text) {
    return offline_hash_embedding(text, dim_);
}

Embedding OfflineMultiModalEmbedder::embed_image(const ImageBytes& image) {
    if (image.empty()) throw Error(ErrorKind::UndecodableImage, "zero-byte image");
    if (auto description = sidecars_.lookup(image)) {
        return offline_hash_embedding(*description, dim_);
    }
    return offline_hash_embedding(util::to_hex(util::fnv1a64(image)), dim_);
}

OfflineGenerator OfflineGenerator::from_fixture_file(const std::filesystem::path& path) {
    OfflineGenerator gen;
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::UnreadableFile, path.string());
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto row = nlohmann::json::parse(line);
            auto answer = row.at("answer").get<std::string>();
            if (row.contains("prompt")) {
                gen.add_fixture(row.at("prompt").get<std::string>(), std::move(answer));
            } else {
                uint64_t h = std::stoull(row.at("prompt_hash").get<std::string>(), nullptr, 16);
                gen.add_fixture_hash(h, std::move(answer));
            }
        } catch (const std::exception& e) {
            throw Error(ErrorKind::MalformedRow,
                        "generator fixture line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return gen;
}

void OfflineGenerator::add_fixture(const std::string& prompt, std::string answer) {
    fixtures_[util::fnv1a64(prompt)] = std::move(answer);
}

void OfflineGenerator::add_fixture_hash(uint64_t prompt_hash, std::string answer) {
    fixtures_[prompt_hash] = std::move(answer);
}

std::string OfflineGenerator::generate(const std::string& prompt,
                                       const std::vector<ImageBytes>& images) {
    (void)images;  // fixtures key on the prompt alone
    if (prompt.empty()) throw Error(ErrorKind::EmptyInput, "empty prompt");
    auto it = fixtures_.find(util::fnv1a64(prompt));
    if (it == fixtures_.end()) {
        throw Error(ErrorKind::FixtureMiss,
                    "no fixture for prompt hash " + util::to_hex(util::fnv1a64(prompt)));
    }
    return it->second;
}

std::string OfflineImageDescriber::describe(const ImageBytes& image, AssetKind kind) {
    (void)kind;
    if (image.empty()) throw Error(ErrorKind::UndecodableImage, "zero-byte image");
    if (auto description = sidecars_.lookup(image)) return *description;
    throw Error(ErrorKind::FixtureMiss, "no sidecar description for image content");
}

std::vector<std::string> OfflineJudge::decompose_claims(const std::string& text) {
    if (text.empty()) throw Error(ErrorKind::EmptyInput, "cannot decompose empty text");
    std::vector<std::string> claims;
    std::string current;
    auto flush = [&] {
        size_t begin = current.find_first_not_of(" \t\r\n");
        if (begin != std::string::npos) {
            size_t end = current.find_last_not_of(" \t\r\n");
            claims.push_back(current.substr(begin, end - begin + 1));
        }
        current.clear();
    };
    for (char c : text) {
        if (c == '.' || c == ';') {
            flush();
        } else {
            current.push_back(c);
        }
    }
    flush();
    return claims;
}

bool OfflineJudge::entails(const std::string& claim, const std::string& premise) {
    std::set<std::string> premise_tokens;
    for (const auto& token : util::split_whitespace(premise)) {
        auto normalized = util::normalize_token(token);
        if (!normalized.empty()) premise_tokens.insert(normalized);
    }
    bool any_content = false;
    for (const auto& token : util::split_whitespace(claim)) {
        auto normalized = util::normalize_token(token);
        if (normalized.empty()) continue;
        any_content = true;
        if (!premise_tokens.contains(normalized)) return false;
    }
    return any_content;
}

double OfflineSimilarityScorer::score(const std::string& answer, const std::string& reference) {
    auto a = offline_hash_embedding(answer, dim_);
    auto b = offline_hash_embedding(reference, dim_);
    double dot = 0.0;
    for (size_t i = 0; i < a.size(); ++i) dot += static_cast<double>(a[i]) * b[i];
    return std::clamp(dot, 0.0, 1.0);
}

void DescriptionCache::load(const std::filesystem::path& path) {
    std::unique_lock lock(mutex_);
    entries_.clear();
    if (!std::filesystem::exists(path)) return;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(util::read_file_text(path));
        for (auto& [key, value] : j.items()) entries_[key] = value.get<std::string>();
    } catch (const std::exception& e) {
        throw Error(ErrorKind::IoFailure, "bad description cache " + path.string() + ": " + e.what());
    }
}

void DescriptionCache::save(const std::filesystem::path& path) const {
    std::shared_lock lock(mutex_);
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, value] : entries_) j[key] = value;
    util::write_file_text(path, j.dump(2) + "\n");
}

std::optional<std::string> DescriptionCache::get(const Uuid& uuid, const std::string& model) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(uuid.to_string() + ":" + model);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void DescriptionCache::put(const Uuid& uuid, const std::string& model, std::string text) {
    std::unique_lock lock(mutex_);
    entries_[uuid.to_string() + ":" + model] = std::move(text);
}

size_t DescriptionCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::string CachedDescriber::describe(const Uuid& uuid, const ImageBytes& image, AssetKind kind) {
    if (auto cached = cache_->get(uuid, inner_->model_name())) return *cached;
    provider_calls_.fetch_add(1);
    auto text = inner_->describe(image, kind);
    cache_->put(uuid, inner_->model_name(), text);
    return text;
}

nlohmann::json ProviderSet::describe_models() const {
    nlohmann::json j = nlohmann::json::object();
    if (text_embedder) j["text_embedder"] = text_embedder->model_name();
    if (mm_embedder) j["mm_embedder"] = mm_embedder->model_name();
    if (generator) j["generator"] = generator->model_name();
    if (describer) j["describer"] = describer->model_name();
    if (judge) j["judge"] = judge->model_name();
    if (scorer) j["scorer"] = scorer->model_name();
    return j;
}

}  // namespace manurag
