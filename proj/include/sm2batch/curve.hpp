#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sm2batch/field.hpp"

// Single-point arithmetic on the SM2 short-Weierstrass curve
// y^2 = x^3 + ax + b over the SCA-256 base field, in affine and Jacobian
// coordinates. The serial double-and-add here is the reference the batch
// kernels are checked against.

namespace sm2b {

struct AffinePoint {
    MontElement x;
    MontElement y;
    bool infinity = false;

    bool operator==(const AffinePoint& o) const {
        if (infinity || o.infinity) return infinity == o.infinity;
        return x == o.x && y == o.y;
    }
};

struct JacobianPoint {
    MontElement X;
    MontElement Y;
    MontElement Z;  // Z == 0 encodes infinity

    bool is_infinity() const { return Z.is_zero(); }
};

// Scalar reduced modulo the group order n.
struct Scalar {
    Limbs256 v{};

    bool operator==(const Scalar&) const = default;
    bool is_zero() const { return v.is_zero(); }
    unsigned bit(std::size_t i) const { return v.bit(i); }

    // Reduces a 256-bit value modulo n (one conditional subtraction).
    static Scalar reduce(const Limbs256& raw);
    // Requires raw < n.
    static Scalar checked(const Limbs256& raw);
    static Scalar from_bytes_be(std::span<const std::uint8_t> bytes);  // reduces
    std::array<std::uint8_t, 32> to_bytes_be() const;
};

struct CurveParams {
    const FieldParams* base_field;   // F_q
    const FieldParams* order_field;  // F_n, for signature arithmetic
    MontElement a;
    MontElement b;
    AffinePoint generator;

    static const CurveParams& sm2();
};

bool is_on_curve(const CurveParams& c, const AffinePoint& p);

AffinePoint affine_infinity(const CurveParams& c);

// Group addition of distinct points via the chord formula:
// 1 modinv + 3 modmul + 6 modsub on the generic path. Throws if called with
// two equal finite points; doubling must go through pdbl_affine.
AffinePoint padd_affine(const CurveParams& c, const AffinePoint& p,
                        const AffinePoint& t);

// Tangent doubling: 1 modinv + 4 modmul + 5 modadd + 3 modsub on the generic
// path. y == 0 and infinity map to infinity.
AffinePoint pdbl_affine(const CurveParams& c, const AffinePoint& p);

// Complete Jacobian addition: handles infinity operands, detects doubling
// and inverse pairs. Takes the 11-multiplication mixed path when t.Z == 1.
JacobianPoint padd_jacobian(const CurveParams& c, const JacobianPoint& p,
                            const JacobianPoint& t);

// Jacobian doubling, 10 modmul.
JacobianPoint pdbl_jacobian(const CurveParams& c, const JacobianPoint& p);

JacobianPoint lift_to_jacobian(const CurveParams& c, const AffinePoint& p);
AffinePoint jacobian_to_affine(const CurveParams& c, const JacobianPoint& p);

// Double-and-add from the least-significant bit: conditional add, then an
// unconditional double of the running point. Reference for all batch paths.
AffinePoint pmul_serial(const CurveParams& c, const Scalar& s,
                        const AffinePoint& p);

AffinePoint negate(const CurveParams& c, const AffinePoint& p);

// Uncompressed encoding: 0x04 || X || Y (65 bytes); infinity is a single
// 0x00 byte. decode validates range and curve membership.
std::vector<std::uint8_t> encode_point(const AffinePoint& p);
AffinePoint decode_point(const CurveParams& c,
                         std::span<const std::uint8_t> bytes);

}  // namespace sm2b
