#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manurag/corpus.hpp"
#include "manurag/uuid.hpp"

namespace manurag {

/// Sliding-window parameters: window = size + overlap tokens, step = size.
struct ChunkingParams {
    size_t chunk_size = 600;
    size_t chunk_overlap = 100;

    /// size >= 1, overlap >= 0, overlap < size.
    bool valid() const { return chunk_size >= 1 && chunk_overlap < chunk_size; }
};

struct Chunk {
    std::string doc_id;
    size_t start = 0;          // token index of window start
    size_t token_count = 0;    // window length, <= size + overlap
    std::string text;          // single-space detokenization of the window
    std::vector<Uuid> images;  // linked uuids inside text, first-seen order

    /// Stable store key; start is zero-padded so lexicographic == numeric.
    std::string id() const;

    bool operator==(const Chunk&) const = default;
};

/// Whitespace-run tokenizer where a `![kind](uuid://...)` link is always
/// one token, even when glued to adjacent text.
std::vector<std::string> tokenize(std::string_view body);

/// Byte span of one full `![kind](uuid://...)` link occurrence.
struct LinkSpan {
    size_t offset = 0;
    size_t length = 0;
    Uuid uuid;
};

std::vector<LinkSpan> find_links(std::string_view body);

/// Windows tokens[i : i+size+overlap) for i = 0, size, 2*size, ... while
/// i < |tokens|. Empty windows are never emitted; the final window may be
/// short. Each chunk's image list comes from extract_links over its text.
std::vector<Chunk> chunk(const std::vector<std::string>& tokens, const std::string& doc_id,
                         const ChunkingParams& params);

/// Re-derives the image list against the corpus catalog; a linked uuid
/// absent from the catalog is MissingAsset.
Chunk attach_images(Chunk chunk, const Corpus& corpus);

void to_json(nlohmann::json& j, const Chunk& c);
void from_json(const nlohmann::json& j, Chunk& c);

}  // namespace manurag
