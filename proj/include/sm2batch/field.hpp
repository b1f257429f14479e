#pragma once

#include <cstdint>

#include "sm2batch/limbs.hpp"

// Montgomery-domain arithmetic modulo a 256-bit odd prime. Two instances
// ship as process-wide constants: the SM2 base field (whose per-word
// Montgomery constant is 1, enabling a mul-free reduction) and the SM2
// group order (generic reduction).
//
// Every element is kept canonical (< q) at operation boundaries. Field-level
// operations tally into a per-thread ledger; the internal multiplies of an
// inversion are deliberately not tallied, so one inversion always reads as
// exactly one modinv no matter how it is computed.

namespace sm2b {

struct OpCountLedger {
    std::uint64_t modmul = 0;
    std::uint64_t modadd = 0;
    std::uint64_t modsub = 0;
    std::uint64_t modinv = 0;

    constexpr bool operator==(const OpCountLedger&) const = default;

    void add(const OpCountLedger& o) {
        modmul += o.modmul;
        modadd += o.modadd;
        modsub += o.modsub;
        modinv += o.modinv;
    }

    // Counter deltas accumulated since an earlier snapshot.
    OpCountLedger since(const OpCountLedger& earlier) const {
        return {modmul - earlier.modmul, modadd - earlier.modadd,
                modsub - earlier.modsub, modinv - earlier.modinv};
    }

    std::uint64_t addsub_total() const { return modadd + modsub; }
};

// Calling thread's counters. Worker pools merge their threads' deltas back
// into the caller at join points, so counting never serializes parallel work.
OpCountLedger& ledger();
OpCountLedger ledger_snapshot();
void ledger_reset();

struct FieldParams {
    Limbs256 q;              // odd prime modulus
    std::uint32_t q_inv;     // -q^{-1} mod 2^32
    Limbs256 r;              // 2^256 mod q (Montgomery one)
    Limbs256 r2;             // 2^512 mod q (entry constant)
    bool is_sm2_prime;       // selects the add/sub-only reduction

    // Derives all Montgomery constants from q. q must be odd.
    static FieldParams make(const Limbs256& q);

    static const FieldParams& sm2_p();  // base field, q_inv == 1
    static const FieldParams& sm2_n();  // group order
};

struct MontElement {
    Limbs256 value;  // residue * R mod q, canonical
    const FieldParams* field = nullptr;

    bool operator==(const MontElement& o) const {
        return field == o.field && value == o.value;
    }
    bool is_zero() const { return value.is_zero(); }
};

MontElement mont_zero(const FieldParams& p);
MontElement mont_one(const FieldParams& p);

// Montgomery entry/exit. to_mont rejects a >= q.
MontElement to_mont(const Limbs256& a, const FieldParams& p);
Limbs256 from_mont(const MontElement& a);

// a*b*R^{-1} mod q. Operands must share the same field instance.
MontElement mont_mul(const MontElement& a, const MontElement& b);

MontElement mod_add(const MontElement& a, const MontElement& b);
MontElement mod_sub(const MontElement& a, const MontElement& b);

// base^e via left-to-right square-and-multiply; multiplies are tallied.
MontElement mod_exp(const MontElement& base, const Limbs256& e);

// Fermat inversion a^{q-2}. Throws on a == 0. Tallies one modinv only.
MontElement mod_inv_fermat(const MontElement& a);

// Reduction primitives, exposed so the two routes can be cross-checked.
// Both require c < q * 2^256 and return c * R^{-1} mod q, canonical.
Limbs256 mont_reduce_generic(const Limbs512& c, const FieldParams& p);
Limbs256 mont_reduce_sm2(const Limbs512& c);

// Same computation as mont_reduce_sm2 with each 32-bit addition/subtraction
// tallied, for verifying the word-operation budget of the merged reduction.
std::size_t mont_reduce_sm2_counted(const Limbs512& c, Limbs256& out);

}  // namespace sm2b
