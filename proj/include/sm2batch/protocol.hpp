#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sm2batch/batch_point.hpp"
#include "sm2batch/curve.hpp"

// Batch ECDSA signing/verification and ECDH key agreement over the SM2
// curve, built on the batch multiplication kernels. Digests arrive as
// scalars already reduced modulo the group order; hashing is the caller's
// concern. Signatures are raw r || s, 64 bytes big-endian on the wire.

namespace sm2b {

struct KeyPair {
    Scalar secret;     // nonzero, < n
    AffinePoint pub;   // secret * G
};

struct Signature {
    Scalar r;
    Scalar s;

    bool operator==(const Signature&) const = default;

    std::array<std::uint8_t, 64> to_bytes() const;
    static Signature from_bytes(std::span<const std::uint8_t> bytes);
};

// Supplier of per-signature secrets. scalar_for must return a value in
// (0, n) and is keyed by (stream, attempt) so batch and serial paths draw
// identical nonces in any execution order.
class NonceSource {
public:
    virtual ~NonceSource() = default;
    virtual Scalar scalar_for(std::uint64_t stream, std::uint32_t attempt) = 0;
};

// Counter-seeded pseudorandom derivation: a pure function of
// (seed, stream, attempt). Reproducible, not a CSPRNG; production callers
// supply their own entropy through the NonceSource interface.
class DeterministicNonceSource final : public NonceSource {
public:
    explicit DeterministicNonceSource(std::uint64_t seed) : seed_(seed) {}
    Scalar scalar_for(std::uint64_t stream, std::uint32_t attempt) override;

private:
    std::uint64_t seed_;
};

// Fresh system entropy on every call; never repeats within a process run.
class SystemNonceSource final : public NonceSource {
public:
    SystemNonceSource();
    Scalar scalar_for(std::uint64_t stream, std::uint32_t attempt) override;

private:
    std::uint64_t base_[2];
    std::uint64_t counter_ = 0;
};

enum class LaneStatus : std::uint8_t {
    ok = 0,
    nonce_exhausted,   // signing retries ran out
    invalid_peer,      // ECDH peer off curve or at infinity
    degenerate_result  // ECDH shared point at infinity
};

struct BatchConfig {
    std::size_t lanes = 0;  // 0 picks workers * 4
    WorkerPool* pool = nullptr;

    std::size_t effective_lanes(std::size_t n) const;
    LanePlan plan(std::size_t n) const;
};

KeyPair keygen(const CurveParams& c, NonceSource& nonces,
               std::uint64_t stream = 0);

struct SignResult {
    std::vector<Signature> sigs;     // valid where status[i] == ok
    std::vector<LaneStatus> status;
};

// Standard ECDSA over the SM2 curve: R = k*G via the fixed-base kernel,
// r = x_R mod n, s = k^{-1}(e + r*d) mod n with every lane's k^{-1} taken
// from one shared batch inversion over the order field. Lanes hitting
// r == 0 or s == 0 retry with a fresh nonce, at most 8 times.
SignResult ecdsa_sign_batch(const CurveParams& c, std::span<const Scalar> digests,
                            std::span<const KeyPair> keys, NonceSource& nonces,
                            const BatchConfig& cfg = {});

// w = s^{-1} mod n (batched), u1 = e*w, u2 = r*w,
// accept iff x(u1*G + u2*Q) == r mod n. Malformed r or s fails the lane
// without touching the curve kernels.
std::vector<bool> ecdsa_verify_batch(const CurveParams& c,
                                     std::span<const Scalar> digests,
                                     std::span<const AffinePoint> publics,
                                     std::span<const Signature> sigs,
                                     const BatchConfig& cfg = {});

struct EcdhResult {
    std::vector<std::array<std::uint8_t, 32>> shared;  // x-coordinate bytes
    std::vector<LaneStatus> status;
};

// shared[j] = x(secrets[j] * peers[j]). Peers are validated per lane.
EcdhResult ecdh_derive_batch(const CurveParams& c,
                             std::span<const Scalar> secrets,
                             std::span<const AffinePoint> peers,
                             const BatchConfig& cfg = {});

// Single-lane compositions of the same equations on the serial primitives;
// the batch paths must agree with these exactly.
SignResult ecdsa_sign_serial(const CurveParams& c, const Scalar& digest,
                             const KeyPair& key, NonceSource& nonces,
                             std::uint64_t stream);
bool ecdsa_verify_serial(const CurveParams& c, const Scalar& digest,
                         const AffinePoint& pub, const Signature& sig);

}  // namespace sm2b
