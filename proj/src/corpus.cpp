#include "manurag/corpus.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "manurag/error.hpp"
#include "manurag/util.hpp"

namespace manurag {

const char* to_string(AssetKind kind) {
    return kind == AssetKind::Table ? "table" : "figure";
}

std::optional<AssetKind> asset_kind_from_string(std::string_view s) {
    if (s == "figure") return AssetKind::Figure;
    if (s == "table") return AssetKind::Table;
    return std::nullopt;
}

const ImageAsset* Corpus::find_asset(const Uuid& uuid) const {
    for (const auto& doc : documents) {
        for (const auto& asset : doc.assets) {
            if (asset.uuid == uuid) return &asset;
        }
    }
    return nullptr;
}

std::vector<Uuid> Corpus::orphan_uuids() const {
    std::set<Uuid> linked;
    for (const auto& doc : documents) {
        for (const auto& uuid : extract_links(doc.body)) linked.insert(uuid);
    }
    std::vector<Uuid> orphans;
    for (const auto& doc : documents) {
        for (const auto& asset : doc.assets) {
            if (!linked.contains(asset.uuid)) orphans.push_back(asset.uuid);
        }
    }
    return orphans;
}

size_t Corpus::asset_count() const {
    size_t n = 0;
    for (const auto& doc : documents) n += doc.assets.size();
    return n;
}

std::vector<Uuid> extract_links(std::string_view body) {
    static constexpr std::string_view kScheme = "uuid://";
    std::vector<Uuid> out;
    std::set<Uuid> seen;
    size_t pos = 0;
    while ((pos = body.find(kScheme, pos)) != std::string_view::npos) {
        size_t hex_start = pos + kScheme.size();
        size_t hex_end = hex_start;
        while (hex_end < body.size() &&
               (std::isxdigit(static_cast<unsigned char>(body[hex_end])) || body[hex_end] == '-')) {
            ++hex_end;
        }
        auto uuid = Uuid::parse(body.substr(hex_start, hex_end - hex_start));
        if (!uuid) {
            throw Error(ErrorKind::MalformedLink,
                        "invalid uuid at byte offset " + std::to_string(pos));
        }
        if (seen.insert(*uuid).second) out.push_back(*uuid);
        pos = hex_end;
    }
    return out;
}

void to_json(nlohmann::json& j, const ImageAsset& a) {
    j = nlohmann::json{{"uuid", a.uuid.to_string()},
                       {"kind", to_string(a.kind)},
                       {"path", a.path}};
    if (!a.caption.empty()) j["caption"] = a.caption;
    if (a.source_page) j["source_page"] = *a.source_page;
}

void from_json(const nlohmann::json& j, ImageAsset& a) {
    auto uuid = Uuid::parse(j.at("uuid").get<std::string>());
    if (!uuid) throw Error(ErrorKind::MalformedManifest, "bad asset uuid");
    a.uuid = *uuid;
    auto kind = asset_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorKind::MalformedManifest, "bad asset kind");
    a.kind = *kind;
    a.path = j.at("path").get<std::string>();
    a.caption = j.value("caption", std::string{});
    if (j.contains("source_page")) {
        auto page = j.at("source_page").get<int64_t>();
        if (page <= 0) throw Error(ErrorKind::MalformedManifest, "source_page must be positive");
        a.source_page = static_cast<uint32_t>(page);
    } else {
        a.source_page.reset();
    }
}

void to_json(nlohmann::json& j, const ExtractedDocument& d) {
    j = nlohmann::json{{"doc_id", d.doc_id}, {"body", d.body}, {"assets", d.assets}};
}

void to_json(nlohmann::json& j, const Corpus& c) {
    j = nlohmann::json{{"root", c.root.string()}, {"documents", c.documents}};
}

Corpus load_corpus(const std::filesystem::path& root) {
    const auto manifest_path = root / "manifest.jsonl";
    std::ifstream manifest(manifest_path);
    if (!manifest) {
        throw Error(ErrorKind::MalformedManifest, "missing manifest: " + manifest_path.string());
    }

    Corpus corpus;
    corpus.root = root;

    std::string line;
    size_t line_no = 0;
    while (std::getline(manifest, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
            ExtractedDocument doc;
            doc.doc_id = record.at("doc_id").get<std::string>();
            const auto markdown = record.at("markdown").get<std::string>();
            doc.assets = record.value("assets", std::vector<ImageAsset>{});
            doc.body = util::read_file_text(root / markdown);
            corpus.documents.push_back(std::move(doc));
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(ErrorKind::MalformedManifest,
                        "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (corpus.documents.empty()) {
        throw Error(ErrorKind::MalformedManifest, "manifest has no document records");
    }

    // Catalog with corpus-wide uniqueness, then asset files, then links.
    std::set<Uuid> catalog;
    for (const auto& doc : corpus.documents) {
        for (const auto& asset : doc.assets) {
            if (!catalog.insert(asset.uuid).second) {
                throw Error(ErrorKind::DuplicateUuid, asset.uuid.to_string());
            }
            const auto asset_path = root / asset.path;
            std::ifstream probe(asset_path, std::ios::binary);
            if (!probe) throw Error(ErrorKind::UnreadableFile, asset_path.string());
        }
    }
    for (const auto& doc : corpus.documents) {
        for (const auto& uuid : extract_links(doc.body)) {
            if (!catalog.contains(uuid)) {
                throw Error(ErrorKind::MissingAsset,
                            uuid.to_string() + " linked from doc " + doc.doc_id);
            }
        }
    }
    return corpus;
}

std::string corpus_content_hash(const Corpus& corpus) {
    uint64_t h = 14695981039346656037ull;
    auto feed = [&h](std::string_view data) {
        for (unsigned char c : data) {
            h ^= static_cast<uint64_t>(c);
            h *= 1099511628211ull;
        }
        h ^= 0xff;  // field separator
        h *= 1099511628211ull;
    };
    for (const auto& doc : corpus.documents) {
        feed(doc.doc_id);
        feed(doc.body);
        for (const auto& asset : doc.assets) {
            feed(asset.uuid.to_string());
            feed(asset.path);
            auto bytes = util::read_file_bytes(corpus.root / asset.path);
            feed(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
            auto sidecar = corpus.root / "assets" / (asset.uuid.to_string() + ".txt");
            if (std::filesystem::exists(sidecar)) feed(util::read_file_text(sidecar));
        }
    }
    return util::to_hex(h);
}

}  // namespace manurag
