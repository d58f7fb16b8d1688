#include "manurag/uuid.hpp"

#include <cctype>

namespace manurag {

namespace {
int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

std::optional<Uuid> Uuid::parse(std::string_view text) {
    std::array<uint8_t, 16> bytes{};
    size_t nibble = 0;
    if (text.size() == 36) {
        for (size_t i = 0; i < text.size(); ++i) {
            bool dash_slot = (i == 8 || i == 13 || i == 18 || i == 23);
            if (dash_slot) {
                if (text[i] != '-') return std::nullopt;
                continue;
            }
            int v = hex_value(text[i]);
            if (v < 0) return std::nullopt;
            if (nibble % 2 == 0) {
                bytes[nibble / 2] = static_cast<uint8_t>(v << 4);
            } else {
                bytes[nibble / 2] |= static_cast<uint8_t>(v);
            }
            ++nibble;
        }
    } else if (text.size() == 32) {
        for (char c : text) {
            int v = hex_value(c);
            if (v < 0) return std::nullopt;
            if (nibble % 2 == 0) {
                bytes[nibble / 2] = static_cast<uint8_t>(v << 4);
            } else {
                bytes[nibble / 2] |= static_cast<uint8_t>(v);
            }
            ++nibble;
        }
    } else {
        return std::nullopt;
    }
    Uuid u;
    u.bytes_ = bytes;
    return u;
}

std::string Uuid::to_string() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(36);
    for (size_t i = 0; i < 16; ++i) {
        if (i == 4 || i == 6 || i == 8 || i == 10) out.push_back('-');
        out.push_back(digits[bytes_[i] >> 4]);
        out.push_back(digits[bytes_[i] & 0xf]);
    }
    return out;
}

}  // namespace manurag
