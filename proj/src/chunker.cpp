#include "manurag/chunker.hpp"

#include <cctype>
#include <sstream>

#include "manurag/error.hpp"
#include "manurag/util.hpp"

namespace manurag {

namespace {

/// Length of the `![...](uuid://...)` link starting at body[pos], or 0.
size_t link_length_at(std::string_view body, size_t pos) {
    if (pos + 1 >= body.size() || body[pos] != '!' || body[pos + 1] != '[') return 0;
    size_t close_bracket = body.find(']', pos + 2);
    if (close_bracket == std::string_view::npos) return 0;
    static constexpr std::string_view kOpen = "](uuid://";
    if (body.compare(close_bracket, kOpen.size(), kOpen) != 0) return 0;
    size_t paren = body.find(')', close_bracket + kOpen.size());
    if (paren == std::string_view::npos) return 0;
    // Links never span whitespace; a run with spaces is plain text.
    for (size_t i = pos; i < paren; ++i) {
        if (std::isspace(static_cast<unsigned char>(body[i]))) return 0;
    }
    return paren - pos + 1;
}

}  // namespace

std::string Chunk::id() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08zu", start);
    return doc_id + "#" + buf;
}

std::vector<std::string> tokenize(std::string_view body) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    size_t i = 0;
    while (i < body.size()) {
        if (std::isspace(static_cast<unsigned char>(body[i]))) {
            flush();
            ++i;
            continue;
        }
        if (size_t len = link_length_at(body, i); len > 0) {
            flush();
            tokens.emplace_back(body.substr(i, len));
            i += len;
            continue;
        }
        current.push_back(body[i]);
        ++i;
    }
    flush();
    return tokens;
}

std::vector<LinkSpan> find_links(std::string_view body) {
    static constexpr std::string_view kScheme = "uuid://";
    std::vector<LinkSpan> spans;
    size_t i = 0;
    while (i < body.size()) {
        size_t len = link_length_at(body, i);
        if (len == 0) {
            ++i;
            continue;
        }
        std::string_view link = body.substr(i, len);
        size_t hex_start = link.find(kScheme) + kScheme.size();
        auto uuid = Uuid::parse(link.substr(hex_start, link.size() - hex_start - 1));
        if (!uuid) {
            throw Error(ErrorKind::MalformedLink, "invalid uuid at byte offset " + std::to_string(i));
        }
        spans.push_back(LinkSpan{i, len, *uuid});
        i += len;
    }
    return spans;
}

std::vector<Chunk> chunk(const std::vector<std::string>& tokens, const std::string& doc_id,
                         const ChunkingParams& params) {
    if (!params.valid()) {
        throw Error(ErrorKind::MalformedRow,
                    "invalid chunking params: size=" + std::to_string(params.chunk_size) +
                        " overlap=" + std::to_string(params.chunk_overlap));
    }
    std::vector<Chunk> chunks;
    const size_t n = tokens.size();
    const size_t window = params.chunk_size + params.chunk_overlap;
    for (size_t i = 0; i < n; i += params.chunk_size) {
        const size_t end = std::min(i + window, n);
        Chunk c;
        c.doc_id = doc_id;
        c.start = i;
        c.token_count = end - i;
        std::string text;
        for (size_t t = i; t < end; ++t) {
            if (t > i) text.push_back(' ');
            text += tokens[t];
        }
        c.text = std::move(text);
        c.images = extract_links(c.text);
        chunks.push_back(std::move(c));
    }
    return chunks;
}

Chunk attach_images(Chunk chunk, const Corpus& corpus) {
    chunk.images = extract_links(chunk.text);
    for (const auto& uuid : chunk.images) {
        if (corpus.find_asset(uuid) == nullptr) {
            throw Error(ErrorKind::MissingAsset,
                        uuid.to_string() + " linked from chunk " + chunk.id());
        }
    }
    return chunk;
}

void to_json(nlohmann::json& j, const Chunk& c) {
    nlohmann::json images = nlohmann::json::array();
    for (const auto& uuid : c.images) images.push_back(uuid.to_string());
    j = nlohmann::json{{"doc_id", c.doc_id},
                       {"start", c.start},
                       {"token_count", c.token_count},
                       {"text", c.text},
                       {"images", std::move(images)}};
}

void from_json(const nlohmann::json& j, Chunk& c) {
    c.doc_id = j.at("doc_id").get<std::string>();
    c.start = j.at("start").get<size_t>();
    c.token_count = j.at("token_count").get<size_t>();
    c.text = j.at("text").get<std::string>();
    c.images.clear();
    for (const auto& item : j.at("images")) {
        auto uuid = Uuid::parse(item.get<std::string>());
        if (!uuid) throw Error(ErrorKind::CorruptIndex, "bad uuid in chunk payload");
        c.images.push_back(*uuid);
    }
}

}  // namespace manurag
