#include "sm2batch/protocol.hpp"

#include <cassert>
#include <random>
#include <stdexcept>

#include "sm2batch/batch_invert.hpp"

namespace sm2b {

namespace {

std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Draws 256 bits from a splitmix stream and rejects values outside (0, n).
Scalar draw_scalar(std::uint64_t state) {
    const Limbs256& n = FieldParams::sm2_n().q;
    for (;;) {
        Limbs256 raw;
        for (std::size_t i = 0; i < 8; i += 2) {
            std::uint64_t v = splitmix(state);
            raw.w[i] = static_cast<std::uint32_t>(v);
            raw.w[i + 1] = static_cast<std::uint32_t>(v >> 32);
        }
        if (!raw.is_zero() && compare(raw, n) == std::strong_ordering::less)
            return Scalar{raw};
    }
}

// r = x_R mod n; x_R < q and q < 2n, so one conditional subtraction.
Scalar coord_mod_n(const MontElement& x) {
    return Scalar::reduce(from_mont(x));
}

bool scalar_in_range(const Scalar& s) {
    return !s.is_zero() &&
           compare(s.v, FieldParams::sm2_n().q) == std::strong_ordering::less;
}

}  // namespace

std::array<std::uint8_t, 64> Signature::to_bytes() const {
    std::array<std::uint8_t, 64> out;
    auto rb = r.to_bytes_be();
    auto sb = s.to_bytes_be();
    std::copy(rb.begin(), rb.end(), out.begin());
    std::copy(sb.begin(), sb.end(), out.begin() + 32);
    return out;
}

Signature Signature::from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != 64)
        throw std::invalid_argument("Signature::from_bytes: expected 64 bytes");
    // Raw values are kept even if out of range; verification rejects them.
    Signature sig;
    sig.r.v = from_bytes_be(bytes.subspan(0, 32));
    sig.s.v = from_bytes_be(bytes.subspan(32, 32));
    return sig;
}

Scalar DeterministicNonceSource::scalar_for(std::uint64_t stream,
                                            std::uint32_t attempt) {
    std::uint64_t state = seed_;
    (void)splitmix(state);
    state ^= 0xA3EC647659359ACDull * (stream + 1);
    (void)splitmix(state);
    state ^= 0xC2B2AE3D27D4EB4Full * (attempt + 1);
    return draw_scalar(state);
}

SystemNonceSource::SystemNonceSource() {
    std::random_device rd;
    base_[0] = (std::uint64_t(rd()) << 32) | rd();
    base_[1] = (std::uint64_t(rd()) << 32) | rd();
}

Scalar SystemNonceSource::scalar_for(std::uint64_t, std::uint32_t) {
    std::uint64_t state = base_[0] ^ (base_[1] + ++counter_ * 0x9E3779B97F4A7C15ull);
    return draw_scalar(state);
}

std::size_t BatchConfig::effective_lanes(std::size_t n) const {
    if (lanes != 0) return lanes;
    std::size_t w = pool ? pool->workers() : 1;
    std::size_t l = w * 4;
    return l < n ? l : (n == 0 ? 1 : n);
}

LanePlan BatchConfig::plan(std::size_t n) const {
    return LanePlan::make(n, effective_lanes(n));
}

KeyPair keygen(const CurveParams& c, NonceSource& nonces, std::uint64_t stream) {
    Scalar d = nonces.scalar_for(stream, 0);
    if (!scalar_in_range(d))
        throw std::logic_error("keygen: nonce source broke its contract");
    return {d, pmul_serial(c, d, c.generator)};
}

SignResult ecdsa_sign_batch(const CurveParams& c, std::span<const Scalar> digests,
                            std::span<const KeyPair> keys, NonceSource& nonces,
                            const BatchConfig& cfg) {
    if (digests.size() != keys.size())
        throw std::invalid_argument("ecdsa_sign_batch: length mismatch");
    const std::size_t n = digests.size();
    SignResult out;
    out.sigs.resize(n);
    out.status.assign(n, LaneStatus::ok);
    if (n == 0) return out;

    const FieldParams& nf = *c.order_field;
    std::vector<std::size_t> pending(n);
    for (std::size_t i = 0; i < n; ++i) pending[i] = i;

    for (std::uint32_t attempt = 0; attempt < 8 && !pending.empty(); ++attempt) {
        const std::size_t m = pending.size();
        std::vector<Scalar> ks;
        ks.reserve(m);
        for (std::size_t idx : pending)
            ks.push_back(nonces.scalar_for(idx, attempt));

        LanePlan plan = cfg.plan(m);
        BatchPointBuffer rpts =
            batch_fpmul(c, ks, sm2_base_table(), plan, cfg.pool);

        // All nonce inverses come from one shared inversion over F_n.
        BatchColumnBuffer kbuf = BatchColumnBuffer::make(m);
        for (std::size_t i = 0; i < m; ++i)
            kbuf.set(i, to_mont(ks[i].v, nf).value);
        BatchColumnBuffer kinv = batch_invert(kbuf, nf, plan, cfg.pool);

        std::vector<std::size_t> retry;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t lane = pending[i];
            AffinePoint rp = rpts.get(c, i);
            if (rp.infinity) {  // cannot happen for 0 < k < n
                retry.push_back(lane);
                continue;
            }
            Scalar r = coord_mod_n(rp.x);
            if (r.is_zero()) {
                retry.push_back(lane);
                continue;
            }
            MontElement e_m = to_mont(digests[lane].v, nf);
            MontElement r_m = to_mont(r.v, nf);
            MontElement d_m = to_mont(keys[lane].secret.v, nf);
            MontElement kinv_m{kinv.get(i), &nf};
            MontElement s_m = mont_mul(kinv_m, mod_add(e_m, mont_mul(r_m, d_m)));
            Scalar s = Scalar::checked(from_mont(s_m));
            if (s.is_zero()) {
                retry.push_back(lane);
                continue;
            }
            out.sigs[lane] = Signature{r, s};
        }
        pending.swap(retry);
    }

    for (std::size_t lane : pending) out.status[lane] = LaneStatus::nonce_exhausted;
    return out;
}

std::vector<bool> ecdsa_verify_batch(const CurveParams& c,
                                     std::span<const Scalar> digests,
                                     std::span<const AffinePoint> publics,
                                     std::span<const Signature> sigs,
                                     const BatchConfig& cfg) {
    if (digests.size() != publics.size() || digests.size() != sigs.size())
        throw std::invalid_argument("ecdsa_verify_batch: length mismatch");
    const std::size_t n = digests.size();
    std::vector<bool> ok(n, false);
    if (n == 0) return ok;

    const FieldParams& nf = *c.order_field;

    // Range rules first; rejected lanes never reach the curve kernels.
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < n; ++i) {
        if (scalar_in_range(sigs[i].r) && scalar_in_range(sigs[i].s) &&
            !publics[i].infinity)
            live.push_back(i);
    }
    if (live.empty()) return ok;
    const std::size_t m = live.size();
    LanePlan plan = cfg.plan(m);

    BatchColumnBuffer sbuf = BatchColumnBuffer::make(m);
    for (std::size_t i = 0; i < m; ++i)
        sbuf.set(i, to_mont(sigs[live[i]].s.v, nf).value);
    BatchColumnBuffer w = batch_invert(sbuf, nf, plan, cfg.pool);

    std::vector<Scalar> u1(m), u2(m);
    std::vector<AffinePoint> pubs;
    pubs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        MontElement w_m{w.get(i), &nf};
        MontElement e_m = to_mont(digests[live[i]].v, nf);
        MontElement r_m = to_mont(sigs[live[i]].r.v, nf);
        u1[i] = Scalar::checked(from_mont(mont_mul(e_m, w_m)));
        u2[i] = Scalar::checked(from_mont(mont_mul(r_m, w_m)));
        pubs.push_back(publics[live[i]]);
    }

    BatchPointBuffer a = batch_fpmul(c, u1, sm2_base_table(), plan, cfg.pool);
    BatchPointBuffer b = batch_upmul(c, u2, transpose_to_columns(c, pubs), plan,
                                     cfg.pool);
    BatchPointBuffer rp = batch_padd(c, a, b, plan, cfg.pool);

    for (std::size_t i = 0; i < m; ++i) {
        AffinePoint p = rp.get(c, i);
        if (p.infinity) continue;
        ok[live[i]] = (coord_mod_n(p.x) == sigs[live[i]].r);
    }
    return ok;
}

EcdhResult ecdh_derive_batch(const CurveParams& c,
                             std::span<const Scalar> secrets,
                             std::span<const AffinePoint> peers,
                             const BatchConfig& cfg) {
    if (secrets.size() != peers.size())
        throw std::invalid_argument("ecdh_derive_batch: length mismatch");
    const std::size_t n = secrets.size();
    EcdhResult out;
    out.shared.assign(n, {});
    out.status.assign(n, LaneStatus::ok);
    if (n == 0) return out;

    std::vector<std::size_t> live;
    std::vector<Scalar> ds;
    std::vector<AffinePoint> ps;
    for (std::size_t i = 0; i < n; ++i) {
        if (peers[i].infinity || !is_on_curve(c, peers[i])) {
            out.status[i] = LaneStatus::invalid_peer;
            continue;
        }
        live.push_back(i);
        ds.push_back(secrets[i]);
        ps.push_back(peers[i]);
    }
    if (live.empty()) return out;

    LanePlan plan = cfg.plan(live.size());
    BatchPointBuffer prod =
        batch_upmul(c, ds, transpose_to_columns(c, ps), plan, cfg.pool);

    for (std::size_t i = 0; i < live.size(); ++i) {
        AffinePoint p = prod.get(c, i);
        if (p.infinity) {
            out.status[live[i]] = LaneStatus::degenerate_result;
            continue;
        }
        out.shared[live[i]] = to_bytes_be(from_mont(p.x));
    }
    return out;
}

SignResult ecdsa_sign_serial(const CurveParams& c, const Scalar& digest,
                             const KeyPair& key, NonceSource& nonces,
                             std::uint64_t stream) {
    SignResult out;
    out.sigs.resize(1);
    out.status.assign(1, LaneStatus::nonce_exhausted);
    const FieldParams& nf = *c.order_field;

    for (std::uint32_t attempt = 0; attempt < 8; ++attempt) {
        Scalar k = nonces.scalar_for(stream, attempt);
        AffinePoint rp = pmul_serial(c, k, c.generator);
        if (rp.infinity) continue;
        Scalar r = coord_mod_n(rp.x);
        if (r.is_zero()) continue;
        MontElement kinv = mod_inv_fermat(to_mont(k.v, nf));
        MontElement s_m = mont_mul(
            kinv, mod_add(to_mont(digest.v, nf),
                          mont_mul(to_mont(r.v, nf), to_mont(key.secret.v, nf))));
        Scalar s = Scalar::checked(from_mont(s_m));
        if (s.is_zero()) continue;
        out.sigs[0] = Signature{r, s};
        out.status[0] = LaneStatus::ok;
        break;
    }
    return out;
}

bool ecdsa_verify_serial(const CurveParams& c, const Scalar& digest,
                         const AffinePoint& pub, const Signature& sig) {
    if (!scalar_in_range(sig.r) || !scalar_in_range(sig.s) || pub.infinity)
        return false;
    const FieldParams& nf = *c.order_field;
    MontElement w = mod_inv_fermat(to_mont(sig.s.v, nf));
    Scalar u1 = Scalar::checked(from_mont(mont_mul(to_mont(digest.v, nf), w)));
    Scalar u2 = Scalar::checked(from_mont(mont_mul(to_mont(sig.r.v, nf), w)));
    JacobianPoint sum = padd_jacobian(
        c, lift_to_jacobian(c, pmul_serial(c, u1, c.generator)),
        lift_to_jacobian(c, pmul_serial(c, u2, pub)));
    AffinePoint rp = jacobian_to_affine(c, sum);
    if (rp.infinity) return false;
    return coord_mod_n(rp.x) == sig.r;
}

}  // namespace sm2b
