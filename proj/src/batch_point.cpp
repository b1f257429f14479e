#include "sm2batch/batch_point.hpp"

#include <cassert>
#include <stdexcept>

namespace sm2b {

namespace {

enum LaneKind : std::uint8_t {
    kGeneric = 0,   // chord formula applies
    kTangent,       // equal operands: tangent denominator joins the batch
    kInfinity,      // result is the point at infinity
    kCopyLeft,      // right operand at infinity: result is the left point
    kCopyRight,     // left operand at infinity: result is the right point
};

struct PaddLaneScratch {
    std::vector<MontElement> prefix;
    std::vector<MontElement> denom;
    std::vector<LaneKind> kind;
    MontElement tail;
};

}  // namespace

BatchPointBuffer BatchPointBuffer::make(std::size_t n) {
    BatchPointBuffer b;
    b.n = n;
    b.x = BatchColumnBuffer::make(n);
    b.y = BatchColumnBuffer::make(n);
    b.infinity_mask = BitMask(n);
    return b;
}

AffinePoint BatchPointBuffer::get(const CurveParams& c, std::size_t i) const {
    return {MontElement{x.get(i), c.base_field},
            MontElement{y.get(i), c.base_field}, infinity_mask.get(i)};
}

void BatchPointBuffer::set(std::size_t i, const AffinePoint& p) {
    // Infinity coordinates are normalized to zero so buffers are
    // bit-reproducible regardless of how the flag was produced.
    x.set(i, p.infinity ? Limbs256::zero() : p.x.value);
    y.set(i, p.infinity ? Limbs256::zero() : p.y.value);
    infinity_mask.set(i, p.infinity);
}

BatchPointBuffer transpose_to_columns(const CurveParams& c,
                                      std::span<const AffinePoint> points) {
    (void)c;
    BatchPointBuffer buf = BatchPointBuffer::make(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) buf.set(i, points[i]);
    return buf;
}

std::vector<AffinePoint> transpose_from_columns(const CurveParams& c,
                                                const BatchPointBuffer& buf) {
    std::vector<AffinePoint> out;
    out.reserve(buf.n);
    for (std::size_t i = 0; i < buf.n; ++i) out.push_back(buf.get(c, i));
    return out;
}

// ---------------------------------------------------------------------------
// batch_padd / batch_pdbl

BatchPointBuffer batch_padd(const CurveParams& c, const BatchPointBuffer& p,
                            const BatchPointBuffer& t, const LanePlan& plan,
                            WorkerPool* pool) {
    if (p.n != t.n)
        throw std::invalid_argument("batch_padd: buffer sizes differ");
    if (plan.total != p.n)
        throw std::invalid_argument("batch_padd: plan does not match batch");
    BatchPointBuffer out = BatchPointBuffer::make(p.n);
    if (p.n == 0) return out;

    const MontElement one = mont_one(*c.base_field);
    const std::size_t L = plan.lanes;
    std::vector<PaddLaneScratch> scratch(L);

    run_tasks(pool, L, [&](std::size_t lane) {
        const auto [begin, end] = plan.assignment[lane];
        PaddLaneScratch& s = scratch[lane];
        const std::size_t len = end - begin;
        s.prefix.reserve(len);
        s.denom.reserve(len);
        s.kind.reserve(len);
        for (std::size_t i = begin; i < end; ++i) {
            AffinePoint a = p.get(c, i);
            AffinePoint b = t.get(c, i);
            LaneKind kind;
            MontElement d = one;
            if (a.infinity && b.infinity) {
                kind = kInfinity;
            } else if (a.infinity) {
                kind = kCopyRight;
            } else if (b.infinity) {
                kind = kCopyLeft;
            } else if (a.x == b.x) {
                if (a.y == b.y && !a.y.is_zero()) {
                    kind = kTangent;
                    d = mod_add(a.y, a.y);
                } else {
                    kind = kInfinity;  // inverse pair (covers y == 0)
                }
            } else {
                kind = kGeneric;
                d = mod_sub(a.x, b.x);
            }
            s.kind.push_back(kind);
            s.denom.push_back(d);
            s.prefix.push_back(s.prefix.empty() ? d
                                                : mont_mul(s.prefix.back(), d));
        }
        s.tail = s.prefix.back();
    });

    std::vector<MontElement> tails;
    tails.reserve(L);
    for (const auto& s : scratch) tails.push_back(s.tail);
    std::vector<MontElement> tail_inv = gather_apply(tails);

    run_tasks(pool, L, [&](std::size_t lane) {
        const auto [begin, end] = plan.assignment[lane];
        const PaddLaneScratch& s = scratch[lane];
        MontElement running = tail_inv[lane];
        for (std::size_t k = end - begin; k-- > 0;) {
            MontElement inv =
                k > 0 ? mont_mul(running, s.prefix[k - 1]) : running;
            if (k > 0) running = mont_mul(running, s.denom[k]);

            const std::size_t i = begin + k;
            switch (s.kind[k]) {
                case kGeneric: {
                    AffinePoint a = p.get(c, i);
                    AffinePoint b = t.get(c, i);
                    MontElement lam = mont_mul(mod_sub(a.y, b.y), inv);
                    MontElement xr =
                        mod_sub(mod_sub(mont_mul(lam, lam), a.x), b.x);
                    MontElement yr =
                        mod_sub(mont_mul(lam, mod_sub(a.x, xr)), a.y);
                    out.set(i, {xr, yr, false});
                    break;
                }
                case kTangent: {
                    AffinePoint a = p.get(c, i);
                    MontElement x2 = mont_mul(a.x, a.x);
                    MontElement num =
                        mod_add(mod_add(mod_add(x2, x2), x2), c.a);
                    MontElement lam = mont_mul(num, inv);
                    MontElement xr =
                        mod_sub(mod_sub(mont_mul(lam, lam), a.x), a.x);
                    MontElement yr =
                        mod_sub(mont_mul(lam, mod_sub(a.x, xr)), a.y);
                    out.set(i, {xr, yr, false});
                    break;
                }
                case kInfinity:
                    out.set(i, affine_infinity(c));
                    break;
                case kCopyLeft:
                    out.set(i, p.get(c, i));
                    break;
                case kCopyRight:
                    out.set(i, t.get(c, i));
                    break;
            }
        }
    });

    return out;
}

BatchPointBuffer batch_pdbl(const CurveParams& c, const BatchPointBuffer& p,
                            const LanePlan& plan, WorkerPool* pool) {
    if (plan.total != p.n)
        throw std::invalid_argument("batch_pdbl: plan does not match batch");
    BatchPointBuffer out = BatchPointBuffer::make(p.n);
    if (p.n == 0) return out;

    const MontElement one = mont_one(*c.base_field);
    const std::size_t L = plan.lanes;
    std::vector<PaddLaneScratch> scratch(L);

    run_tasks(pool, L, [&](std::size_t lane) {
        const auto [begin, end] = plan.assignment[lane];
        PaddLaneScratch& s = scratch[lane];
        for (std::size_t i = begin; i < end; ++i) {
            AffinePoint a = p.get(c, i);
            bool degenerate = a.infinity || a.y.is_zero();
            s.kind.push_back(degenerate ? kInfinity : kTangent);
            s.denom.push_back(degenerate ? one : mod_add(a.y, a.y));
            s.prefix.push_back(s.prefix.empty()
                                   ? s.denom.back()
                                   : mont_mul(s.prefix.back(), s.denom.back()));
        }
        s.tail = s.prefix.back();
    });

    std::vector<MontElement> tails;
    tails.reserve(L);
    for (const auto& s : scratch) tails.push_back(s.tail);
    std::vector<MontElement> tail_inv = gather_apply(tails);

    run_tasks(pool, L, [&](std::size_t lane) {
        const auto [begin, end] = plan.assignment[lane];
        const PaddLaneScratch& s = scratch[lane];
        MontElement running = tail_inv[lane];
        for (std::size_t k = end - begin; k-- > 0;) {
            MontElement inv =
                k > 0 ? mont_mul(running, s.prefix[k - 1]) : running;
            if (k > 0) running = mont_mul(running, s.denom[k]);

            const std::size_t i = begin + k;
            if (s.kind[k] == kInfinity) {
                out.set(i, affine_infinity(c));
                continue;
            }
            AffinePoint a = p.get(c, i);
            MontElement x2 = mont_mul(a.x, a.x);
            MontElement num = mod_add(mod_add(mod_add(x2, x2), x2), c.a);
            MontElement lam = mont_mul(num, inv);
            MontElement xr = mod_sub(mod_sub(mont_mul(lam, lam), a.x), a.x);
            MontElement yr = mod_sub(mont_mul(lam, mod_sub(a.x, xr)), a.y);
            out.set(i, {xr, yr, false});
        }
    });

    return out;
}

// ---------------------------------------------------------------------------
// Fused multiplication kernels

BatchPointBuffer batch_upmul(const CurveParams& c, std::span<const Scalar> scalars,
                             const BatchPointBuffer& points, const LanePlan& plan,
                             WorkerPool* pool) {
    if (scalars.size() != points.n)
        throw std::invalid_argument("batch_upmul: scalar count mismatch");
    if (plan.total != points.n)
        throw std::invalid_argument("batch_upmul: plan does not match batch");
    const std::size_t n = points.n;

    BatchPointBuffer qstate = BatchPointBuffer::make(n);
    for (std::size_t j = 0; j < n; ++j) qstate.infinity_mask.set(j, true);
    if (n == 0) return qstate;

    BatchPointBuffer pstate = points;
    const MontElement one = mont_one(*c.base_field);
    const std::size_t L = plan.lanes;

    FusedScratch scratch(n, one);
    std::vector<MontElement> lane_tails(L, one);

    for (std::size_t bit = 0; bit < 256; ++bit) {
        run_tasks(pool, L, [&](std::size_t lane) {
            const auto [begin, end] = plan.assignment[lane];
            MontElement t1_acc = one;
            for (std::size_t j = begin; j < end; ++j) {
                AffinePoint pp = pstate.get(c, j);
                AffinePoint qq = qstate.get(c, j);
                MontElement t1 = mod_add(pp.y, pp.y);
                MontElement t2 = mod_sub(pp.x, qq.x);
                // Masked lanes feed the identity so the running product and
                // the operation sequence never depend on point state.
                bool mask1 = pp.infinity || t1.is_zero();
                bool mask2 = pp.infinity || qq.infinity || t2.is_zero();
                scratch.tail_products[j] = t1_acc;
                t1_acc = mont_mul(t1_acc, mask1 ? one : t1);
                t1_acc = mont_mul(t1_acc, mask2 ? one : t2);
            }
            lane_tails[lane] = t1_acc;
        });

        std::vector<MontElement> tail_inv = gather_apply(lane_tails);

        run_tasks(pool, L, [&](std::size_t lane) {
            const auto [begin, end] = plan.assignment[lane];
            MontElement inv_acc = tail_inv[lane];
            for (std::size_t j = end; j-- > begin;) {
                AffinePoint pp = pstate.get(c, j);
                AffinePoint qq = qstate.get(c, j);

                // Recompute the doubling denominator and the discarded
                // partial product instead of having stored them.
                MontElement t1 = mod_add(pp.y, pp.y);
                bool mask1 = pp.infinity || t1.is_zero();
                const MontElement& t1m = mask1 ? one : t1;
                MontElement t1_partial =
                    mont_mul(t1m, scratch.tail_products[j]);
                MontElement t2_inv = mont_mul(inv_acc, t1_partial);

                // chord addition R = P + Q
                MontElement lam_a = mont_mul(mod_sub(pp.y, qq.y), t2_inv);
                MontElement xr =
                    mod_sub(mod_sub(mont_mul(lam_a, lam_a), pp.x), qq.x);
                MontElement yr =
                    mod_sub(mont_mul(lam_a, mod_sub(pp.x, xr)), pp.y);

                MontElement t2 = mod_sub(pp.x, qq.x);
                bool mask2 = pp.infinity || qq.infinity || t2.is_zero();
                inv_acc = mont_mul(inv_acc, mask2 ? one : t2);
                MontElement t1_inv =
                    mont_mul(inv_acc, scratch.tail_products[j]);

                // tangent doubling P' = 2P
                MontElement px2 = mont_mul(pp.x, pp.x);
                MontElement num2 =
                    mod_add(mod_add(mod_add(px2, px2), px2), c.a);
                MontElement lam_d = mont_mul(num2, t1_inv);
                MontElement x2 =
                    mod_sub(mod_sub(mont_mul(lam_d, lam_d), pp.x), pp.x);
                MontElement y2 =
                    mod_sub(mont_mul(lam_d, mod_sub(pp.x, x2)), pp.y);

                inv_acc = mont_mul(inv_acc, t1m);

                AffinePoint r{xr, yr, false};
                if (qq.infinity) {
                    r = pp;  // identity assignment, including P at infinity
                } else if (pp.infinity) {
                    r = qq;
                } else if (t2.is_zero()) {
                    // Q == P doubles, Q == -P cancels.
                    r = (pp.y == qq.y) ? AffinePoint{x2, y2, false}
                                       : affine_infinity(c);
                }

                if (!pp.infinity)
                    pstate.set(j, mask1 ? affine_infinity(c)
                                        : AffinePoint{x2, y2, false});
                if (scalars[j].bit(bit)) qstate.set(j, r);
            }
        });
    }

    return qstate;
}

PrecomputedBase precompute_base_table(const CurveParams& c,
                                      const AffinePoint& g) {
    if (!is_on_curve(c, g))
        throw std::invalid_argument("precompute_base_table: point off curve");
    PrecomputedBase base;
    base.table[0] = g;
    for (std::size_t i = 1; i < 256; ++i)
        base.table[i] = pdbl_affine(c, base.table[i - 1]);
    return base;
}

const PrecomputedBase& sm2_base_table() {
    static const PrecomputedBase base =
        precompute_base_table(CurveParams::sm2(), CurveParams::sm2().generator);
    return base;
}

BatchPointBuffer batch_fpmul(const CurveParams& c, std::span<const Scalar> scalars,
                             const PrecomputedBase& base, const LanePlan& plan,
                             WorkerPool* pool) {
    if (plan.total != scalars.size())
        throw std::invalid_argument("batch_fpmul: plan does not match batch");
    const std::size_t n = scalars.size();

    BatchPointBuffer qstate = BatchPointBuffer::make(n);
    for (std::size_t j = 0; j < n; ++j) qstate.infinity_mask.set(j, true);
    if (n == 0) return qstate;

    const MontElement one = mont_one(*c.base_field);
    const std::size_t L = plan.lanes;

    FusedScratch scratch(n, one);
    std::vector<MontElement> lane_tails(L, one);

    for (std::size_t bit = 0; bit < 256; ++bit) {
        const AffinePoint& g = base.table[bit];  // always finite

        run_tasks(pool, L, [&](std::size_t lane) {
            const auto [begin, end] = plan.assignment[lane];
            MontElement acc = one;
            for (std::size_t j = begin; j < end; ++j) {
                AffinePoint qq = qstate.get(c, j);
                MontElement t2 = mod_sub(g.x, qq.x);
                bool mask = qq.infinity || t2.is_zero();
                scratch.tail_products[j] = acc;
                acc = mont_mul(acc, mask ? one : t2);
            }
            lane_tails[lane] = acc;
        });

        std::vector<MontElement> tail_inv = gather_apply(lane_tails);

        run_tasks(pool, L, [&](std::size_t lane) {
            const auto [begin, end] = plan.assignment[lane];
            MontElement inv_acc = tail_inv[lane];
            for (std::size_t j = end; j-- > begin;) {
                AffinePoint qq = qstate.get(c, j);
                MontElement t2 = mod_sub(g.x, qq.x);
                bool mask = qq.infinity || t2.is_zero();

                MontElement t2_inv =
                    mont_mul(inv_acc, scratch.tail_products[j]);
                inv_acc = mont_mul(inv_acc, mask ? one : t2);

                MontElement lam = mont_mul(mod_sub(g.y, qq.y), t2_inv);
                MontElement xr =
                    mod_sub(mod_sub(mont_mul(lam, lam), g.x), qq.x);
                MontElement yr = mod_sub(mont_mul(lam, mod_sub(g.x, xr)), g.y);

                AffinePoint r{xr, yr, false};
                if (qq.infinity) {
                    r = g;
                } else if (t2.is_zero()) {
                    // A reduced scalar's partial sum can only collide with a
                    // table entry as an inverse pair (their sum is n).
                    assert(!(qq.y == g.y));
                    r = affine_infinity(c);
                }

                if (scalars[j].bit(bit)) qstate.set(j, r);
            }
        });
    }

    return qstate;
}

}  // namespace sm2b
