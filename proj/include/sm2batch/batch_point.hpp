#pragma once

#include <array>
#include <span>
#include <vector>

#include "sm2batch/batch_buffer.hpp"
#include "sm2batch/batch_invert.hpp"
#include "sm2batch/curve.hpp"
#include "sm2batch/worker_pool.hpp"

// Batch elliptic-curve kernels over column-major point buffers. Each kernel
// runs the affine group law with all per-element modular inversions folded
// into one shared inversion per pass: per-lane compression of the
// denominators, a single gather/apply inversion across lane tails, then an
// unwind pass that recovers each denominator's inverse and completes the
// point formulas in the same sweep.
//
// The multiplication kernels iterate that pass once per scalar bit and keep
// a fixed operation sequence regardless of scalar values: masked lanes run
// the same arithmetic on substituted operands and the results are applied
// through constant-shape selects.

namespace sm2b {

struct BatchPointBuffer {
    std::size_t n = 0;
    BatchColumnBuffer x;
    BatchColumnBuffer y;
    BitMask infinity_mask;

    static BatchPointBuffer make(std::size_t n);

    AffinePoint get(const CurveParams& c, std::size_t i) const;
    void set(std::size_t i, const AffinePoint& p);
};

BatchPointBuffer transpose_to_columns(const CurveParams& c,
                                      std::span<const AffinePoint> points);
std::vector<AffinePoint> transpose_from_columns(const CurveParams& c,
                                                const BatchPointBuffer& buf);

// Element-wise p[i] + t[i]. Lanes whose chord denominator vanishes are
// routed through masked special cases: doubling pairs take the tangent
// denominator into the same shared inversion, inverse pairs and infinity
// operands bypass the formulas entirely. One modinv per call.
BatchPointBuffer batch_padd(const CurveParams& c, const BatchPointBuffer& p,
                            const BatchPointBuffer& t, const LanePlan& plan,
                            WorkerPool* pool = nullptr);

// Element-wise 2*p[i]; y == 0 and infinity map to infinity. One modinv.
BatchPointBuffer batch_pdbl(const CurveParams& c, const BatchPointBuffer& p,
                            const LanePlan& plan, WorkerPool* pool = nullptr);

// Scratch of the fused multiplication kernel: one running-product tail per
// point pair, regardless of how many denominators the pair compressed.
// The discarded intermediate products are recomputed during the unwind.
struct FusedScratch {
    std::vector<MontElement> tail_products;

    static std::size_t required_elements(std::size_t n) { return n; }

    explicit FusedScratch(std::size_t n, const MontElement& fill)
        : tail_products(required_elements(n), fill) {}
};

// output[j] = scalars[j] * points[j] by 256 fused double-and-add iterations.
// Each iteration compresses both the doubling and the addition denominators
// of every lane under one running product, performs a single shared
// inversion, and unwinds with the accumulator update gated on the scalar
// bit. Exactly 256 modinv per call; the ledger is scalar-independent.
BatchPointBuffer batch_upmul(const CurveParams& c, std::span<const Scalar> scalars,
                             const BatchPointBuffer& points, const LanePlan& plan,
                             WorkerPool* pool = nullptr);

// Doubling ladder of a fixed base: table[i] = 2^i * g.
struct PrecomputedBase {
    std::array<AffinePoint, 256> table;
};

// Builds the ladder by serial doubling; rejects off-curve input.
PrecomputedBase precompute_base_table(const CurveParams& c, const AffinePoint& g);

// Table for the SM2 generator, built on first use.
const PrecomputedBase& sm2_base_table();

// output[j] = scalars[j] * g over the precomputed ladder: additions only,
// no runtime doubling, dummy additions on zero bits. 256 modinv per call.
BatchPointBuffer batch_fpmul(const CurveParams& c, std::span<const Scalar> scalars,
                             const PrecomputedBase& base, const LanePlan& plan,
                             WorkerPool* pool = nullptr);

}  // namespace sm2b
