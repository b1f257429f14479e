#include "doctest.h"
#include "oracle.hpp"
#include "sm2batch/field.hpp"

using namespace sm2b;
using oracle::cpp_int;

namespace {

cpp_int field_q() { return oracle::to_int(FieldParams::sm2_p().q); }

// c < q * 2^256, slightly biased to the top of the range.
Limbs512 random_reducible(oracle::Rng& rng, const cpp_int& q) {
    for (;;) {
        Limbs512 c = rng.limbs512();
        if (oracle::to_int(c) < q * oracle::pow2(256)) return c;
    }
}

}  // namespace

TEST_CASE("field parameter derivation") {
    const FieldParams& p = FieldParams::sm2_p();
    const cpp_int q = field_q();

    CHECK(p.is_sm2_prime);
    CHECK(p.q_inv == 1);  // the SCA-256 property the fast reduction relies on
    CHECK(oracle::to_int(p.r) == oracle::pow2(256) % q);
    CHECK(oracle::to_int(p.r2) == (oracle::pow2(256) * oracle::pow2(256)) % q);

    // q * q_inv == -1 mod 2^32
    CHECK(static_cast<std::uint32_t>(p.q.w[0] * p.q_inv) == 0xFFFFFFFFu);

    const FieldParams& n = FieldParams::sm2_n();
    CHECK_FALSE(n.is_sm2_prime);
    CHECK(static_cast<std::uint32_t>(n.q.w[0] * n.q_inv) == 0xFFFFFFFFu);
    CHECK(oracle::to_int(n.r) == oracle::pow2(256) % oracle::to_int(n.q));
}

TEST_CASE("montgomery entry and exit") {
    const FieldParams& p = FieldParams::sm2_p();
    const cpp_int q = field_q();
    oracle::Rng rng(10);

    CHECK(to_mont(Limbs256::zero(), p).is_zero());
    CHECK(to_mont(Limbs256::one(), p).value == p.r);

    for (int t = 0; t < 2000; ++t) {
        Limbs256 x = rng.below(p.q);
        MontElement m = to_mont(x, p);
        CHECK(oracle::to_int(m.value) ==
              (oracle::to_int(x) * oracle::pow2(256)) % q);
        CHECK(from_mont(m) == x);
    }
    CHECK(from_mont(mont_zero(p)) == Limbs256::zero());

    Limbs256 qm1 = oracle::to_limbs256(q - 1);
    CHECK(from_mont(to_mont(qm1, p)) == qm1);

    CHECK_THROWS_AS(to_mont(p.q, p), std::out_of_range);
}

TEST_CASE("mont_mul matches reference on both fields") {
    oracle::Rng rng(11);
    for (const FieldParams* p : {&FieldParams::sm2_p(), &FieldParams::sm2_n()}) {
        const cpp_int q = oracle::to_int(p->q);
        for (int t = 0; t < 50000; ++t) {
            Limbs256 x = rng.below(p->q);
            Limbs256 y = rng.below(p->q);
            MontElement r = mont_mul(to_mont(x, *p), to_mont(y, *p));
            CHECK(from_mont(r) ==
                  oracle::to_limbs256(oracle::to_int(x) * oracle::to_int(y) % q));
        }
    }
}

TEST_CASE("mont_mul identities and algebra") {
    const FieldParams& p = FieldParams::sm2_p();
    oracle::Rng rng(12);

    MontElement x = to_mont(rng.below(p.q), p);
    CHECK(mont_mul(mont_one(p), x) == x);
    CHECK(mont_mul(mont_zero(p), x).is_zero());

    for (int t = 0; t < 2000; ++t) {
        MontElement a = to_mont(rng.below(p.q), p);
        MontElement b = to_mont(rng.below(p.q), p);
        MontElement c = to_mont(rng.below(p.q), p);
        CHECK(mont_mul(a, b) == mont_mul(b, a));
        CHECK(mont_mul(mont_mul(a, b), c) == mont_mul(a, mont_mul(b, c)));
        // distributivity over addition
        CHECK(mont_mul(a, mod_add(b, c)) ==
              mod_add(mont_mul(a, b), mont_mul(a, c)));
    }

    MontElement other = to_mont(Limbs256::one(), FieldParams::sm2_n());
    CHECK_THROWS_AS(mont_mul(x, other), std::invalid_argument);
}

TEST_CASE("modular add/sub") {
    const FieldParams& p = FieldParams::sm2_p();
    const cpp_int q = field_q();
    oracle::Rng rng(13);

    MontElement a = to_mont(rng.below(p.q), p);
    CHECK(mod_add(a, mont_zero(p)) == a);
    CHECK(mod_sub(a, a).is_zero());

    for (int t = 0; t < 20000; ++t) {
        Limbs256 x = rng.below(p.q);
        Limbs256 y = rng.below(p.q);
        cpp_int ix = oracle::to_int(x), iy = oracle::to_int(y);
        CHECK(from_mont(mod_add(to_mont(x, p), to_mont(y, p))) ==
              oracle::to_limbs256((ix + iy) % q));
        CHECK(from_mont(mod_sub(to_mont(x, p), to_mont(y, p))) ==
              oracle::to_limbs256(((ix - iy) % q + q) % q));
    }
}

TEST_CASE("generic reduction matches reference") {
    const FieldParams& p = FieldParams::sm2_p();
    const FieldParams& n = FieldParams::sm2_n();
    oracle::Rng rng(14);

    CHECK(mont_reduce_generic(Limbs512{}, p) == Limbs256::zero());

    for (const FieldParams* f : {&p, &n}) {
        const cpp_int q = oracle::to_int(f->q);
        const cpp_int rinv = oracle::mod_inverse(oracle::pow2(256), q);
        for (int t = 0; t < 10000; ++t) {
            Limbs512 c = random_reducible(rng, q);
            CHECK(oracle::to_int(mont_reduce_generic(c, *f)) ==
                  (oracle::to_int(c) * rinv) % q);
        }
        // top of the allowed input range, and q*(2^256 - 1)
        for (const cpp_int& edge :
             {q * oracle::pow2(256) - 1, q * (oracle::pow2(256) - 1)}) {
            Limbs512 top = oracle::to_limbs512(edge);
            CHECK(oracle::to_int(mont_reduce_generic(top, *f)) ==
                  (edge * rinv) % q);
        }
    }
}

TEST_CASE("sm2 reduction is bit-exact with the generic route") {
    const FieldParams& p = FieldParams::sm2_p();
    const cpp_int q = field_q();
    oracle::Rng rng(15);

    CHECK(mont_reduce_sm2(Limbs512{}) == Limbs256::zero());

    // boundary shapes: 0, 1, q-1, (q-1) << 256, q*2^256 - 1 and neighbours
    std::vector<cpp_int> edges = {0,
                                  1,
                                  q - 1,
                                  (q - 1) << 256,
                                  q * oracle::pow2(256) - 1,
                                  q * oracle::pow2(256) - 2,
                                  oracle::pow2(256),
                                  oracle::pow2(512) % (q * oracle::pow2(256))};
    for (const cpp_int& e : edges) {
        Limbs512 c = oracle::to_limbs512(e);
        CHECK(mont_reduce_sm2(c) == mont_reduce_generic(c, p));
    }

    for (int t = 0; t < 100000; ++t) {
        Limbs512 c = random_reducible(rng, q);
        CHECK(mont_reduce_sm2(c) == mont_reduce_generic(c, p));
    }
}

TEST_CASE("sm2 reduction stays within the word-op budget") {
    oracle::Rng rng(16);
    const cpp_int q = field_q();
    std::size_t max_ops = 0;
    for (int t = 0; t < 1000; ++t) {
        Limbs512 c = random_reducible(rng, q);
        Limbs256 out;
        std::size_t ops = mont_reduce_sm2_counted(c, out);
        CHECK(out == mont_reduce_sm2(c));
        if (ops > max_ops) max_ops = ops;
    }
    CHECK(max_ops <= 72);
}

TEST_CASE("exponentiation") {
    const FieldParams& p = FieldParams::sm2_p();
    oracle::Rng rng(17);

    MontElement x = to_mont(rng.below(p.q), p);
    CHECK(mod_exp(x, Limbs256::one()) == x);
    CHECK(mod_exp(x, Limbs256::zero()) == mont_one(p));

    Limbs256 qm2 =
        sub_with_borrow(p.q, Limbs256{{2, 0, 0, 0, 0, 0, 0, 0}}).diff;
    for (int t = 0; t < 20; ++t) {
        MontElement a = to_mont(rng.below(p.q), p);
        if (a.is_zero()) continue;
        CHECK(mont_mul(mod_exp(a, qm2), a) == mont_one(p));
    }
}

TEST_CASE("fermat inversion") {
    const FieldParams& p = FieldParams::sm2_p();
    const cpp_int q = field_q();
    oracle::Rng rng(18);

    CHECK(mod_inv_fermat(mont_one(p)) == mont_one(p));

    Limbs256 qm1 = oracle::to_limbs256(q - 1);
    MontElement neg1 = to_mont(qm1, p);
    CHECK(mod_inv_fermat(neg1) == neg1);

    for (int t = 0; t < 50; ++t) {
        MontElement a = to_mont(rng.below(p.q), p);
        if (a.is_zero()) continue;
        CHECK(mont_mul(mod_inv_fermat(a), a) == mont_one(p));
        // cross-check against extended Euclid on the raw residue
        cpp_int ia = oracle::to_int(from_mont(a));
        CHECK(from_mont(mod_inv_fermat(a)) ==
              oracle::to_limbs256(oracle::mod_inverse(ia, q)));
    }

    CHECK_THROWS_AS(mod_inv_fermat(mont_zero(p)), std::domain_error);
}

TEST_CASE("ledger counts field operations") {
    const FieldParams& p = FieldParams::sm2_p();
    oracle::Rng rng(19);
    MontElement a = to_mont(rng.below(p.q), p);
    MontElement b = to_mont(rng.below(p.q), p);

    ledger_reset();
    (void)mont_mul(a, b);
    CHECK(ledger_snapshot() == OpCountLedger{1, 0, 0, 0});

    (void)mod_add(a, b);
    (void)mod_sub(a, b);
    CHECK(ledger_snapshot() == OpCountLedger{1, 1, 1, 0});

    // one inversion reads as exactly one modinv, nothing else
    ledger_reset();
    (void)mod_inv_fermat(a);
    CHECK(ledger_snapshot() == OpCountLedger{0, 0, 0, 1});

    // same count on the order field (generic reduction dispatch)
    ledger_reset();
    MontElement na = to_mont(rng.below(FieldParams::sm2_n().q),
                             FieldParams::sm2_n());
    (void)mont_mul(na, na);
    CHECK(ledger_snapshot().modmul == 1);
    ledger_reset();
}

TEST_CASE("outputs stay canonical") {
    const FieldParams& p = FieldParams::sm2_p();
    oracle::Rng rng(20);
    for (int t = 0; t < 5000; ++t) {
        MontElement a = to_mont(rng.below(p.q), p);
        MontElement b = to_mont(rng.below(p.q), p);
        for (const MontElement& r :
             {mont_mul(a, b), mod_add(a, b), mod_sub(a, b)}) {
            CHECK(compare(r.value, p.q) == std::strong_ordering::less);
        }
    }
}
