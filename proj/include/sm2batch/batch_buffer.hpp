#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <vector>

#include "sm2batch/limbs.hpp"

namespace sm2b {

// Column-major storage for a batch of 256-bit values: columns[k][i] is limb
// k of element i, so each limb position of the whole batch is contiguous.
// Kernels address elements only through get/set.
struct BatchColumnBuffer {
    std::size_t n = 0;
    std::array<std::vector<std::uint32_t>, 8> columns;

    static BatchColumnBuffer make(std::size_t n) {
        BatchColumnBuffer b;
        b.n = n;
        for (auto& col : b.columns) col.assign(n, 0);
        return b;
    }

    Limbs256 get(std::size_t i) const {
        Limbs256 v;
        for (std::size_t k = 0; k < 8; ++k) v.w[k] = columns[k][i];
        return v;
    }

    void set(std::size_t i, const Limbs256& v) {
        for (std::size_t k = 0; k < 8; ++k) columns[k][i] = v.w[k];
    }
};

// Dense bitmask over a batch. Distinct bits may be written concurrently by
// different workers (lane boundaries can share a word), so accesses go
// through relaxed atomics; the pool join orders everything afterwards.
class BitMask {
public:
    BitMask() = default;
    explicit BitMask(std::size_t n) : n_(n), bits_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const {
        std::uint64_t w = std::atomic_ref<const std::uint64_t>(bits_[i / 64])
                              .load(std::memory_order_relaxed);
        return (w >> (i % 64)) & 1u;
    }

    void set(std::size_t i, bool v) {
        std::uint64_t bit = std::uint64_t(1) << (i % 64);
        std::atomic_ref<std::uint64_t> w(bits_[i / 64]);
        if (v)
            w.fetch_or(bit, std::memory_order_relaxed);
        else
            w.fetch_and(~bit, std::memory_order_relaxed);
    }

    bool any() const {
        for (std::uint64_t b : bits_)
            if (b) return true;
        return false;
    }

    bool operator==(const BitMask&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> bits_;
};

}  // namespace sm2b
