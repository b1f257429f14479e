#pragma once

// Test-only reference arithmetic on boost arbitrary-precision integers,
// independent of the library's limb and Montgomery code paths. The modular
// inverse here is extended-Euclid on purpose: a different algorithm than
// the Fermat path it checks.

#include <boost/multiprecision/cpp_int.hpp>

#include <random>

#include "sm2batch/limbs.hpp"

namespace oracle {

using boost::multiprecision::cpp_int;

inline cpp_int to_int(const sm2b::Limbs256& a) {
    cpp_int v = 0;
    for (std::size_t i = 8; i-- > 0;) v = (v << 32) | a.w[i];
    return v;
}

inline cpp_int to_int(const sm2b::Limbs512& a) {
    cpp_int v = 0;
    for (std::size_t i = 16; i-- > 0;) v = (v << 32) | a.w[i];
    return v;
}

inline sm2b::Limbs256 to_limbs256(cpp_int v) {
    sm2b::Limbs256 r;
    for (std::size_t i = 0; i < 8; ++i) {
        r.w[i] = static_cast<std::uint32_t>(v & 0xFFFFFFFF);
        v >>= 32;
    }
    return r;
}

inline sm2b::Limbs512 to_limbs512(cpp_int v) {
    sm2b::Limbs512 r;
    for (std::size_t i = 0; i < 16; ++i) {
        r.w[i] = static_cast<std::uint32_t>(v & 0xFFFFFFFF);
        v >>= 32;
    }
    return r;
}

inline cpp_int pow2(unsigned k) { return cpp_int(1) << k; }

// Extended Euclid; m must be prime and a nonzero mod m.
inline cpp_int mod_inverse(cpp_int a, const cpp_int& m) {
    a %= m;
    if (a < 0) a += m;
    cpp_int r0 = m, r1 = a, s0 = 0, s1 = 1;
    while (r1 != 0) {
        cpp_int q = r0 / r1;
        cpp_int r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        cpp_int s2 = s0 - q * s1;
        s0 = s1;
        s1 = s2;
    }
    if (s0 < 0) s0 += m;
    return s0;
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    std::uint32_t word() { return static_cast<std::uint32_t>(gen()); }

    sm2b::Limbs256 limbs256() {
        sm2b::Limbs256 r;
        for (auto& w : r.w) w = word();
        return r;
    }

    sm2b::Limbs512 limbs512() {
        sm2b::Limbs512 r;
        for (auto& w : r.w) w = word();
        return r;
    }

    // Uniform value below bound (rejection).
    sm2b::Limbs256 below(const sm2b::Limbs256& bound) {
        for (;;) {
            sm2b::Limbs256 c = limbs256();
            if (sm2b::compare(c, bound) == std::strong_ordering::less) return c;
        }
    }
};

}  // namespace oracle
