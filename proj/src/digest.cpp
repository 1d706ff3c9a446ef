#include "sloganaudit/digest.hpp"

#include <array>

namespace sloganaudit {

std::string to_hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string Fnv64::hex() const { return to_hex64(hash_); }

} // namespace sloganaudit
