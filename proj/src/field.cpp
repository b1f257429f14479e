#include "sm2batch/field.hpp"

#include <cassert>

namespace sm2b {

namespace {

// SCA-256 prime 2^256 - 2^224 - 2^96 + 2^64 - 1, least-significant word first.
constexpr Limbs256 kSm2P{{0xFFFFFFFFu, 0xFFFFFFFFu, 0x00000000u, 0xFFFFFFFFu,
                          0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFEu}};

// SM2 group order.
constexpr Limbs256 kSm2N{{0x39D54123u, 0x53BBF409u, 0x21C6052Bu, 0x7203DF6Bu,
                          0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFEu}};

thread_local OpCountLedger tl_ledger;

bool canonical(const Limbs256& v, const FieldParams& p) {
    return compare(v, p.q) == std::strong_ordering::less;
}

// (a + b) mod q for canonical operands; no tallying.
Limbs256 add_mod_raw(const Limbs256& a, const Limbs256& b, const FieldParams& p) {
    AddResult s = add_with_carry(a, b);
    if (s.carry || compare(s.sum, p.q) != std::strong_ordering::less)
        return sub_with_borrow(s.sum, p.q).diff;
    return s.sum;
}

Limbs256 sub_mod_raw(const Limbs256& a, const Limbs256& b, const FieldParams& p) {
    SubResult d = sub_with_borrow(a, b);
    if (d.borrow) return add_with_carry(d.diff, p.q).sum;
    return d.diff;
}

// Word-tally policies for the SM2 reduction: production uses NoTally, the
// verification entry point uses Tally. Same code path either way.
struct NoTally {
    void count(std::size_t) {}
};
struct Tally {
    std::size_t n = 0;
    void count(std::size_t k) { n += k; }
};

// Generic SOS reduction: eliminate the low limb word by word with the
// per-word constant q_inv, then keep the high half. The accumulator carries
// one extra word so intermediate carries are never dropped.
Limbs256 reduce_generic_raw(const Limbs512& c, const FieldParams& p) {
    std::uint32_t acc[17];
    for (std::size_t i = 0; i < 16; ++i) acc[i] = c.w[i];
    acc[16] = 0;

    for (std::size_t i = 0; i < 8; ++i) {
        std::uint32_t m = acc[i] * p.q_inv;  // mod 2^32
        std::uint64_t carry = 0;
        for (std::size_t j = 0; j < 8; ++j) {
            std::uint64_t t = std::uint64_t(m) * p.q.w[j] + acc[i + j] + carry;
            acc[i + j] = static_cast<std::uint32_t>(t);
            carry = t >> 32;
        }
        for (std::size_t k = i + 8; carry != 0 && k < 17; ++k) {
            std::uint64_t t = std::uint64_t(acc[k]) + carry;
            acc[k] = static_cast<std::uint32_t>(t);
            carry = t >> 32;
        }
    }

    Limbs256 hi;
    for (std::size_t i = 0; i < 8; ++i) hi.w[i] = acc[8 + i];
    // Result < 2q given c < q*2^256; at most one subtraction needed. A set
    // top word means the value exceeded 2^256, where subtracting q is the
    // same wrap-around borrow.
    if (acc[16] || compare(hi, p.q) != std::strong_ordering::less)
        hi = sub_with_borrow(hi, p.q).diff;
    return hi;
}

// SCA-256 reduction. With q_inv = 1 the multiplier for each eliminated word
// is the word itself, and m*q
//     = m*2^256 - m*2^224 - m*2^96 + m*2^64 - m
// is a handful of signed single-word contributions. Two words are
// eliminated per pass, their combined contributions folded into one sweep
// with a signed carry, so the whole reduction is additions and subtractions
// only. Eliminated words vanish exactly (q = -1 mod 2^32) and generate no
// carry of their own.
template <class TallyT>
Limbs256 reduce_sm2_impl(const Limbs512& c, TallyT& tally) {
    std::int64_t acc[17];
    for (std::size_t i = 0; i < 16; ++i) acc[i] = c.w[i];
    acc[16] = 0;

    for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t j = 2 * k;
        const std::int64_t m0 = acc[j];
        const std::int64_t m1 = acc[j + 1];
        const std::int64_t d = m1 - m0;
        tally.count(1);

        // Combined deltas of m0*q (at offset j) and m1*q (at offset j+1):
        //   j+2: +m0   j+3: m1-m0   j+4: -m1
        //   j+7: -m0   j+8: m0-m1   j+9: +m1
        std::int64_t carry = 0;
        for (std::size_t w = j + 2; w < 17; ++w) {
            std::int64_t delta = 0;
            if (w == j + 2) delta = m0;
            else if (w == j + 3) delta = d;
            else if (w == j + 4) delta = -m1;
            else if (w == j + 7) delta = -m0;
            else if (w == j + 8) delta = -d;
            else if (w == j + 9) delta = m1;
            std::int64_t t = acc[w] + delta + carry;
            acc[w] = t & 0xFFFFFFFF;
            carry = t >> 32;  // arithmetic shift keeps borrows signed
        }
        tally.count(17 - (j + 2));
        acc[j] = 0;
        acc[j + 1] = 0;
    }

    Limbs256 hi;
    for (std::size_t i = 0; i < 8; ++i)
        hi.w[i] = static_cast<std::uint32_t>(acc[8 + i]);
    if (acc[16] || compare(hi, kSm2P) != std::strong_ordering::less)
        hi = sub_with_borrow(hi, kSm2P).diff;
    return hi;
}

Limbs256 reduce_dispatch(const Limbs512& c, const FieldParams& p) {
    if (p.is_sm2_prime) {
        NoTally t;
        return reduce_sm2_impl(c, t);
    }
    return reduce_generic_raw(c, p);
}

// Unledgered multiply; building block for entry/exit and inversion.
Limbs256 mul_raw(const Limbs256& a, const Limbs256& b, const FieldParams& p) {
    return reduce_dispatch(mul_wide(a, b), p);
}

// Unledgered exponentiation used inside mod_inv_fermat.
Limbs256 exp_raw(const Limbs256& base, const Limbs256& e, const FieldParams& p) {
    Limbs256 r = p.r;  // one
    for (std::size_t i = 256; i-- > 0;) {
        r = mul_raw(r, r, p);
        if (e.bit(i)) r = mul_raw(r, base, p);
    }
    return r;
}

}  // namespace

OpCountLedger& ledger() { return tl_ledger; }
OpCountLedger ledger_snapshot() { return tl_ledger; }
void ledger_reset() { tl_ledger = OpCountLedger{}; }

FieldParams FieldParams::make(const Limbs256& q) {
    if ((q.w[0] & 1u) == 0) throw std::invalid_argument("modulus must be odd");
    FieldParams p;
    p.q = q;

    // Newton iteration for q^{-1} mod 2^32; five steps double the precision
    // from the 3 correct low bits of q itself.
    std::uint32_t x = q.w[0];
    for (int i = 0; i < 5; ++i) x *= 2u - q.w[0] * x;
    p.q_inv = ~x + 1u;  // -q^{-1} mod 2^32

    // 2^256 mod q by 256 modular doublings of 1, then 256 more for 2^512.
    Limbs256 t = Limbs256::one();
    for (int i = 0; i < 256; ++i) t = add_mod_raw(t, t, p);
    p.r = t;
    for (int i = 0; i < 256; ++i) t = add_mod_raw(t, t, p);
    p.r2 = t;

    p.is_sm2_prime = (q == kSm2P);
    return p;
}

const FieldParams& FieldParams::sm2_p() {
    static const FieldParams p = FieldParams::make(kSm2P);
    return p;
}

const FieldParams& FieldParams::sm2_n() {
    static const FieldParams p = FieldParams::make(kSm2N);
    return p;
}

MontElement mont_zero(const FieldParams& p) { return {Limbs256::zero(), &p}; }
MontElement mont_one(const FieldParams& p) { return {p.r, &p}; }

MontElement to_mont(const Limbs256& a, const FieldParams& p) {
    if (compare(a, p.q) != std::strong_ordering::less)
        throw std::out_of_range("to_mont: value not below modulus");
    return {mul_raw(a, p.r2, p), &p};
}

Limbs256 from_mont(const MontElement& a) {
    assert(a.field && canonical(a.value, *a.field));
    return mul_raw(a.value, Limbs256::one(), *a.field);
}

MontElement mont_mul(const MontElement& a, const MontElement& b) {
    if (a.field == nullptr || a.field != b.field)
        throw std::invalid_argument("mont_mul: operands from different fields");
    assert(canonical(a.value, *a.field) && canonical(b.value, *b.field));
    tl_ledger.modmul++;
    return {mul_raw(a.value, b.value, *a.field), a.field};
}

MontElement mod_add(const MontElement& a, const MontElement& b) {
    if (a.field == nullptr || a.field != b.field)
        throw std::invalid_argument("mod_add: operands from different fields");
    assert(canonical(a.value, *a.field) && canonical(b.value, *b.field));
    tl_ledger.modadd++;
    return {add_mod_raw(a.value, b.value, *a.field), a.field};
}

MontElement mod_sub(const MontElement& a, const MontElement& b) {
    if (a.field == nullptr || a.field != b.field)
        throw std::invalid_argument("mod_sub: operands from different fields");
    assert(canonical(a.value, *a.field) && canonical(b.value, *b.field));
    tl_ledger.modsub++;
    return {sub_mod_raw(a.value, b.value, *a.field), a.field};
}

MontElement mod_exp(const MontElement& base, const Limbs256& e) {
    assert(base.field && canonical(base.value, *base.field));
    MontElement r = mont_one(*base.field);
    for (std::size_t i = 256; i-- > 0;) {
        r = mont_mul(r, r);
        if (e.bit(i)) r = mont_mul(r, base);
    }
    return r;
}

MontElement mod_inv_fermat(const MontElement& a) {
    assert(a.field && canonical(a.value, *a.field));
    if (a.is_zero()) throw std::domain_error("mod_inv_fermat: zero input");
    const FieldParams& p = *a.field;
    Limbs256 qm2 = sub_with_borrow(p.q, Limbs256{{2, 0, 0, 0, 0, 0, 0, 0}}).diff;
    tl_ledger.modinv++;
    return {exp_raw(a.value, qm2, p), a.field};
}

Limbs256 mont_reduce_generic(const Limbs512& c, const FieldParams& p) {
    return reduce_generic_raw(c, p);
}

Limbs256 mont_reduce_sm2(const Limbs512& c) {
    NoTally t;
    return reduce_sm2_impl(c, t);
}

std::size_t mont_reduce_sm2_counted(const Limbs512& c, Limbs256& out) {
    Tally t;
    out = reduce_sm2_impl(c, t);
    return t.n;
}

}  // namespace sm2b
