#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace designflow {

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

/// Raw 32-byte SHA-256 digest.
std::string sha256_raw(std::string_view bytes);

constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace designflow
