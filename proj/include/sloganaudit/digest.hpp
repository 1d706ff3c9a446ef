#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sloganaudit {

// 64-bit FNV-1a. Used for cache keys and corpus digests; stable across
// platforms and builds, unlike std::hash.
class Fnv64 {
public:
    Fnv64& update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            hash_ ^= c;
            hash_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    Fnv64& update(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            hash_ ^= static_cast<unsigned char>(v >> (8 * i));
            hash_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    // Field separator so that ("ab","c") and ("a","bc") hash differently.
    Fnv64& sep() { return update(std::string_view("\x1f", 1)); }

    std::uint64_t value() const { return hash_; }
    std::string hex() const;

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::string to_hex64(std::uint64_t v);

} // namespace sloganaudit
