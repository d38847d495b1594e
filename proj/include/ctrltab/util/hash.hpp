#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ctrltab::util {

/// 64-bit FNV-1a. Stable across platforms; used for split assignment and seeding.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Lowercase hex SHA-256 of a file's bytes. Throws Error if unreadable.
std::string sha256_file(const std::string& path);

} // namespace ctrltab::util
