#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace manurag {

/// 128-bit identifier. Canonical text form is lowercase 8-4-4-4-12;
/// parsing also accepts the bare 32-hex-digit form.
class Uuid {
public:
    Uuid() : bytes_{} {}

    static std::optional<Uuid> parse(std::string_view text);

    std::string to_string() const;

    auto operator<=>(const Uuid&) const = default;

    const std::array<uint8_t, 16>& bytes() const { return bytes_; }

private:
    std::array<uint8_t, 16> bytes_;
};

}  // namespace manurag
