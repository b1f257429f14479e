#include "sm2batch/limbs.hpp"

namespace sm2b {

Limbs256 from_bytes_be(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != 32)
        throw std::invalid_argument("from_bytes_be: expected exactly 32 bytes");
    Limbs256 r;
    for (std::size_t i = 0; i < 8; ++i) {
        const std::uint8_t* p = bytes.data() + 4 * (7 - i);
        r.w[i] = (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
                 (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
    }
    return r;
}

std::array<std::uint8_t, 32> to_bytes_be(const Limbs256& a) {
    std::array<std::uint8_t, 32> out{};
    for (std::size_t i = 0; i < 8; ++i) {
        std::uint8_t* p = out.data() + 4 * (7 - i);
        p[0] = static_cast<std::uint8_t>(a.w[i] >> 24);
        p[1] = static_cast<std::uint8_t>(a.w[i] >> 16);
        p[2] = static_cast<std::uint8_t>(a.w[i] >> 8);
        p[3] = static_cast<std::uint8_t>(a.w[i]);
    }
    return out;
}

}  // namespace sm2b
