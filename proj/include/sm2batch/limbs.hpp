#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

// Fixed-width unsigned integers built from 32-bit limbs, least-significant
// limb first. Limbs256 is the working width for field elements; Limbs512
// holds full products before reduction. All carries are explicit.

namespace sm2b {

struct Limbs256 {
    std::array<std::uint32_t, 8> w{};

    constexpr bool operator==(const Limbs256&) const = default;

    static constexpr Limbs256 zero() { return {}; }

    static constexpr Limbs256 one() {
        Limbs256 r;
        r.w[0] = 1;
        return r;
    }

    constexpr bool is_zero() const {
        std::uint32_t acc = 0;
        for (std::uint32_t x : w) acc |= x;
        return acc == 0;
    }

    // Bit i of the 256-bit value, 0 = least significant.
    constexpr unsigned bit(std::size_t i) const {
        return (w[i / 32] >> (i % 32)) & 1u;
    }
};

struct Limbs512 {
    std::array<std::uint32_t, 16> w{};

    constexpr bool operator==(const Limbs512&) const = default;

    constexpr bool is_zero() const {
        std::uint32_t acc = 0;
        for (std::uint32_t x : w) acc |= x;
        return acc == 0;
    }

    constexpr Limbs256 low_half() const {
        Limbs256 r;
        for (std::size_t i = 0; i < 8; ++i) r.w[i] = w[i];
        return r;
    }

    static constexpr Limbs512 from_low(const Limbs256& a) {
        Limbs512 r;
        for (std::size_t i = 0; i < 8; ++i) r.w[i] = a.w[i];
        return r;
    }
};

struct AddResult {
    Limbs256 sum;
    std::uint32_t carry;  // 0 or 1; sum + carry*2^256 == a + b
};

struct SubResult {
    Limbs256 diff;
    std::uint32_t borrow;  // 0 or 1; diff - borrow*2^256 == a - b
};

constexpr AddResult add_with_carry(const Limbs256& a, const Limbs256& b) {
    AddResult r{};
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        std::uint64_t t = std::uint64_t(a.w[i]) + b.w[i] + carry;
        r.sum.w[i] = static_cast<std::uint32_t>(t);
        carry = t >> 32;
    }
    r.carry = static_cast<std::uint32_t>(carry);
    return r;
}

constexpr SubResult sub_with_borrow(const Limbs256& a, const Limbs256& b) {
    SubResult r{};
    std::uint64_t borrow = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        std::uint64_t t = std::uint64_t(a.w[i]) - b.w[i] - borrow;
        r.diff.w[i] = static_cast<std::uint32_t>(t);
        borrow = (t >> 32) & 1;  // two's-complement wrap marks the borrow
    }
    r.borrow = static_cast<std::uint32_t>(borrow);
    return r;
}

// Schoolbook product: m row-by-row multiply-accumulate sweeps, one per limb
// of b. This row structure is what the reduction and batch kernels assume.
constexpr Limbs512 mul_wide(const Limbs256& a, const Limbs256& b) {
    Limbs512 r{};
    for (std::size_t i = 0; i < 8; ++i) {
        std::uint64_t carry = 0;
        for (std::size_t j = 0; j < 8; ++j) {
            std::uint64_t t = std::uint64_t(a.w[j]) * b.w[i] + r.w[i + j] + carry;
            r.w[i + j] = static_cast<std::uint32_t>(t);
            carry = t >> 32;
        }
        r.w[i + 8] = static_cast<std::uint32_t>(carry);
    }
    return r;
}

constexpr std::strong_ordering compare(const Limbs256& a, const Limbs256& b) {
    for (std::size_t i = 8; i-- > 0;) {
        if (a.w[i] != b.w[i])
            return a.w[i] < b.w[i] ? std::strong_ordering::less
                                   : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

// Canonical external encoding is big-endian, exactly 32 bytes.
Limbs256 from_bytes_be(std::span<const std::uint8_t> bytes);
std::array<std::uint8_t, 32> to_bytes_be(const Limbs256& a);

}  // namespace sm2b
