#pragma once

// Test-only affine EC arithmetic and textbook ECDSA over boost cpp_int,
// sharing nothing with the library's arithmetic. Used to check protocol
// outputs end to end.

#include "oracle.hpp"

namespace oracle {

struct EcParams {
    cpp_int q, a, b, n, gx, gy;
};

inline EcParams sm2_params() {
    EcParams p;
    p.q = pow2(256) - pow2(224) - pow2(96) + pow2(64) - 1;
    p.a = p.q - 3;
    p.b = cpp_int("0x28E9FA9E9D9F5E344D5A9E4BCF6509A7F39789F515AB8F92DDBCBD414D940E93");
    p.n = cpp_int("0xFFFFFFFEFFFFFFFFFFFFFFFFFFFFFFFF7203DF6B21C6052B53BBF40939D54123");
    p.gx = cpp_int("0x32C4AE2C1F1981195F9904466A39C9948FE30BBFF2660BE1715A4589334C74C7");
    p.gy = cpp_int("0xBC3736A2F4F6779C59BDCEE36B692153D0A9877CC62A474002DF32E52139F0A0");
    return p;
}

struct EcPoint {
    cpp_int x, y;
    bool inf = false;
};

inline EcPoint ec_add(const EcParams& p, const EcPoint& a, const EcPoint& b) {
    if (a.inf) return b;
    if (b.inf) return a;
    cpp_int lam;
    if (a.x == b.x) {
        if ((a.y + b.y) % p.q == 0) return {0, 0, true};
        lam = (3 * a.x * a.x + p.a) % p.q *
              mod_inverse(2 * a.y % p.q, p.q) % p.q;
    } else {
        lam = ((a.y - b.y) % p.q + p.q) % p.q *
              mod_inverse(((a.x - b.x) % p.q + p.q) % p.q, p.q) % p.q;
    }
    cpp_int xr = ((lam * lam - a.x - b.x) % p.q + p.q) % p.q;
    cpp_int yr = ((lam * (a.x - xr) - a.y) % p.q + p.q) % p.q;
    return {xr, yr, false};
}

inline EcPoint ec_mul(const EcParams& p, cpp_int k, EcPoint g) {
    EcPoint acc{0, 0, true};
    while (k > 0) {
        if (k & 1) acc = ec_add(p, acc, g);
        g = ec_add(p, g, g);
        k >>= 1;
    }
    return acc;
}

struct EcdsaSig {
    cpp_int r, s;
};

inline EcdsaSig ecdsa_sign(const EcParams& p, const cpp_int& e,
                           const cpp_int& d, const cpp_int& k) {
    EcPoint rp = ec_mul(p, k, {p.gx, p.gy, false});
    cpp_int r = rp.x % p.n;
    cpp_int s = mod_inverse(k, p.n) * ((e + r * d) % p.n) % p.n;
    return {r, s};
}

inline bool ecdsa_verify(const EcParams& p, const cpp_int& e,
                         const EcPoint& pub, const EcdsaSig& sig) {
    if (sig.r <= 0 || sig.r >= p.n || sig.s <= 0 || sig.s >= p.n) return false;
    cpp_int w = mod_inverse(sig.s, p.n);
    cpp_int u1 = e * w % p.n;
    cpp_int u2 = sig.r * w % p.n;
    EcPoint rp = ec_add(p, ec_mul(p, u1, {p.gx, p.gy, false}),
                        ec_mul(p, u2, pub));
    if (rp.inf) return false;
    return rp.x % p.n == sig.r;
}

}  // namespace oracle
