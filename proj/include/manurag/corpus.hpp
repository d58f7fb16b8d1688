#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "manurag/uuid.hpp"

namespace manurag {

enum class AssetKind { Figure, Table };

const char* to_string(AssetKind kind);
std::optional<AssetKind> asset_kind_from_string(std::string_view s);

/// One extracted figure or table. `path` is relative to the corpus root.
struct ImageAsset {
    Uuid uuid;
    AssetKind kind = AssetKind::Figure;
    std::string path;
    std::string caption;                   // empty = none
    std::optional<uint32_t> source_page;

    bool operator==(const ImageAsset&) const = default;
};

/// Markdown body whose figure/table occurrences are inline
/// `![kind](uuid://<hex>)` links; formulas stay inline as $...$ LaTeX.
struct ExtractedDocument {
    std::string doc_id;
    std::string body;
    std::vector<ImageAsset> assets;

    bool operator==(const ExtractedDocument&) const = default;
};

struct Corpus {
    std::vector<ExtractedDocument> documents;
    std::filesystem::path root;

    /// Corpus-wide lookup; uuids are unique across documents.
    const ImageAsset* find_asset(const Uuid& uuid) const;

    /// Assets never referenced by any body link. Legal, but reported.
    std::vector<Uuid> orphan_uuids() const;

    size_t asset_count() const;
};

/// UUIDs in order of first occurrence in `body`, duplicates removed.
/// Any `uuid://` token whose hex part does not parse is MalformedLink
/// (message carries the byte offset).
std::vector<Uuid> extract_links(std::string_view body);

/// Loads `<root>/manifest.jsonl` plus per-document markdown and verifies
/// every invariant: uuid uniqueness across the corpus, every body link
/// resolving in the catalog, every asset file readable.
Corpus load_corpus(const std::filesystem::path& root);

void to_json(nlohmann::json& j, const ImageAsset& a);
void from_json(const nlohmann::json& j, ImageAsset& a);
void to_json(nlohmann::json& j, const ExtractedDocument& d);
void to_json(nlohmann::json& j, const Corpus& c);

/// FNV-1a over manifest, bodies, asset bytes and sidecar descriptions.
/// Binds built indexes to the exact corpus content.
std::string corpus_content_hash(const Corpus& corpus);

}  // namespace manurag
