#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "manurag/chunker.hpp"
#include "manurag/error.hpp"
#include "manurag/providers.hpp"
#include "manurag/util.hpp"

namespace manurag {

/// Sim(q, v) = q·v / (|q||v|). Accumulates in double.
double cosine(const Embedding& a, const Embedding& b);

struct ScoredHit {
    std::string id;
    double score = 0.0;
    size_t index = 0;  // position in the owning store
};

namespace detail {

constexpr uint32_t kIndexMagic = 0x5849524d;  // "MRIX" little-endian
constexpr uint32_t kIndexVersion = 1;
constexpr size_t kIdField = 64;  // zero-padded id slot per record

inline void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline uint32_t get_u32(const uint8_t* p) {
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

inline uint64_t get_u64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace detail

/// Exact flat-scan store: every query compares against every entry, so
/// results always match a full sort. Ties break by ascending id. Build is
/// single-writer; a finished store is safe for concurrent readers.
template <typename Payload>
class VectorStore {
public:
    struct Entry {
        std::string id;
        Embedding vector;
        Payload payload;

        bool operator==(const Entry&) const = default;
    };

    explicit VectorStore(size_t dim) : dim_(dim) {
        if (dim == 0) throw Error(ErrorKind::DimMismatch, "store dim must be positive");
    }

    size_t dim() const { return dim_; }
    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Entry& entry(size_t i) const { return entries_.at(i); }
    const std::vector<Entry>& entries() const { return entries_; }

    /// Number of top_k calls served; lets tests assert a store was never
    /// consulted.
    uint64_t query_count() const { return query_count_; }

    void insert(std::string id, Embedding vector, Payload payload) {
        if (vector.size() != dim_) {
            throw Error(ErrorKind::DimMismatch, "vector dim " + std::to_string(vector.size()) +
                                                    " != store dim " + std::to_string(dim_));
        }
        double norm_sq = 0.0;
        for (float x : vector) {
            if (!std::isfinite(x)) throw Error(ErrorKind::ZeroVector, "non-finite vector value");
            norm_sq += static_cast<double>(x) * x;
        }
        if (norm_sq == 0.0) throw Error(ErrorKind::ZeroVector, "all-zero vector for id " + id);
        if (!ids_.insert(id).second) {
            throw Error(ErrorKind::DuplicateUuid, "duplicate store id " + id);
        }
        entries_.push_back(Entry{std::move(id), std::move(vector), std::move(payload)});
    }

    /// The k highest-cosine entries (all of them when k >= size), sorted
    /// by descending score then ascending id.
    std::vector<ScoredHit> top_k(const Embedding& query, size_t k) const {
        ++query_count_;
        if (entries_.empty()) throw Error(ErrorKind::EmptyStore, "top_k on empty store");
        if (query.size() != dim_) {
            throw Error(ErrorKind::DimMismatch, "query dim " + std::to_string(query.size()) +
                                                    " != store dim " + std::to_string(dim_));
        }
        std::vector<ScoredHit> hits;
        hits.reserve(entries_.size());
        for (size_t i = 0; i < entries_.size(); ++i) {
            hits.push_back(ScoredHit{entries_[i].id, cosine(query, entries_[i].vector), i});
        }
        std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.id < b.id;
        });
        if (hits.size() > k) hits.resize(k);
        return hits;
    }

    /// Binary records at `path` (header + fixed-width id/vector rows,
    /// FNV-1a checksum) plus `<path>.catalog.jsonl` carrying payloads.
    void save(const std::filesystem::path& path) const {
        std::string records;
        records.reserve(entries_.size() * (detail::kIdField + dim_ * 4));
        for (const auto& entry : entries_) {
            if (entry.id.size() >= detail::kIdField) {
                throw Error(ErrorKind::IoFailure, "store id exceeds 63 bytes: " + entry.id);
            }
            std::string id_field(detail::kIdField, '\0');
            std::copy(entry.id.begin(), entry.id.end(), id_field.begin());
            records += id_field;
            for (float x : entry.vector) detail::put_u32(records, std::bit_cast<uint32_t>(x));
        }
        std::string header;
        detail::put_u32(header, detail::kIndexMagic);
        detail::put_u32(header, detail::kIndexVersion);
        detail::put_u32(header, static_cast<uint32_t>(dim_));
        detail::put_u64(header, entries_.size());
        detail::put_u64(header, util::fnv1a64(records));
        util::write_file_text(path, header + records);

        std::ostringstream catalog;
        for (const auto& entry : entries_) {
            nlohmann::json row{{"id", entry.id}, {"payload", entry.payload}};
            catalog << row.dump() << "\n";
        }
        util::write_file_text(path.string() + ".catalog.jsonl", catalog.str());
    }

    static VectorStore load(const std::filesystem::path& path) {
        auto bytes = util::read_file_bytes(path);
        constexpr size_t kHeader = 4 + 4 + 4 + 8 + 8;
        if (bytes.size() < kHeader) throw Error(ErrorKind::CorruptIndex, "short header");
        const uint8_t* p = bytes.data();
        if (detail::get_u32(p) != detail::kIndexMagic) {
            throw Error(ErrorKind::CorruptIndex, "bad magic");
        }
        if (detail::get_u32(p + 4) != detail::kIndexVersion) {
            throw Error(ErrorKind::CorruptIndex, "unsupported version");
        }
        const size_t dim = detail::get_u32(p + 8);
        const uint64_t count = detail::get_u64(p + 12);
        const uint64_t checksum = detail::get_u64(p + 20);
        if (dim == 0) throw Error(ErrorKind::CorruptIndex, "zero dim");
        const size_t record = detail::kIdField + dim * 4;
        if (bytes.size() != kHeader + count * record) {
            throw Error(ErrorKind::CorruptIndex, "truncated or padded records");
        }
        std::string_view records(reinterpret_cast<const char*>(p + kHeader),
                                 bytes.size() - kHeader);
        if (util::fnv1a64(records) != checksum) {
            throw Error(ErrorKind::CorruptIndex, "checksum mismatch");
        }

        std::ifstream catalog(path.string() + ".catalog.jsonl");
        if (!catalog) throw Error(ErrorKind::CorruptIndex, "missing catalog sidecar");

        VectorStore store(dim);
        std::string line;
        for (uint64_t i = 0; i < count; ++i) {
            const uint8_t* rec = p + kHeader + i * record;
            std::string id(reinterpret_cast<const char*>(rec));  // up to first NUL
            if (id.size() >= detail::kIdField) throw Error(ErrorKind::CorruptIndex, "unterminated id");
            Embedding vector(dim);
            for (size_t d = 0; d < dim; ++d) {
                vector[d] = std::bit_cast<float>(detail::get_u32(rec + detail::kIdField + d * 4));
            }
            if (!std::getline(catalog, line)) {
                throw Error(ErrorKind::CorruptIndex, "catalog shorter than index");
            }
            Payload payload;
            std::string catalog_id;
            try {
                auto row = nlohmann::json::parse(line);
                catalog_id = row.at("id").get<std::string>();
                payload = row.at("payload").get<Payload>();
            } catch (const Error&) {
                throw;
            } catch (const std::exception& e) {
                throw Error(ErrorKind::CorruptIndex, std::string("bad catalog row: ") + e.what());
            }
            if (catalog_id != id) {
                throw Error(ErrorKind::CorruptIndex, "catalog id does not match index record");
            }
            store.insert(std::move(id), std::move(vector), std::move(payload));
        }
        if (std::getline(catalog, line) && !line.empty()) {
            throw Error(ErrorKind::CorruptIndex, "catalog longer than index");
        }
        return store;
    }

    bool operator==(const VectorStore& other) const {
        return dim_ == other.dim_ && entries_ == other.entries_;
    }

private:
    size_t dim_;
    std::vector<Entry> entries_;
    std::set<std::string> ids_;
    mutable uint64_t query_count_ = 0;
};

using TextVectorStore = VectorStore<Chunk>;
using ImageVectorStore = VectorStore<ImageAsset>;

/// Union of the hit chunks' image lists, ordered by (hit rank, in-chunk
/// order), deduplicated.
std::vector<Uuid> referenced_images(const std::vector<ScoredHit>& hits,
                                    const TextVectorStore& store);

}  // namespace manurag
