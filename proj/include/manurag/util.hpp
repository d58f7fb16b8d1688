#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "manurag/error.hpp"

namespace manurag::util {

// FNV-1a, 64 bit. Used for the offline embedding buckets, prompt fixture
// keys, and index checksums, so it must never change.
inline uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= static_cast<uint64_t>(c);
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t fnv1a64(const std::vector<uint8_t>& data) {
    return fnv1a64(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

std::string to_hex(uint64_t value);

std::string lowercase(std::string_view s);

/// Whitespace-run split. The chunker layers link atomicity on top of this.
std::vector<std::string> split_whitespace(std::string_view text);

/// Case-folded token with surrounding (not inner) punctuation removed.
/// Empty result means the token was pure punctuation.
std::string normalize_token(std::string_view token);

std::string base64_encode(const std::vector<uint8_t>& data);
std::vector<uint8_t> base64_decode(std::string_view encoded);

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const void* data, size_t size);
void write_file_text(const std::filesystem::path& path, std::string_view text);

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Results land in
/// index order because each call owns its slot; the first exception wins
/// and is rethrown after all workers drain.
void parallel_for(size_t n, size_t workers, const std::function<void(size_t)>& fn);

}  // namespace manurag::util
