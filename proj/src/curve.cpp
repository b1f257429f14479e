#include "sm2batch/curve.hpp"

#include <cassert>
#include <stdexcept>

namespace sm2b {

namespace {

// SM2 recommended parameters (a = q - 3).
constexpr Limbs256 kA{{0xFFFFFFFCu, 0xFFFFFFFFu, 0x00000000u, 0xFFFFFFFFu,
                       0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFEu}};
constexpr Limbs256 kB{{0x4D940E93u, 0xDDBCBD41u, 0x15AB8F92u, 0xF39789F5u,
                       0xCF6509A7u, 0x4D5A9E4Bu, 0x9D9F5E34u, 0x28E9FA9Eu}};
constexpr Limbs256 kGx{{0x334C74C7u, 0x715A4589u, 0xF2660BE1u, 0x8FE30BBFu,
                        0x6A39C994u, 0x5F990446u, 0x1F198119u, 0x32C4AE2Cu}};
constexpr Limbs256 kGy{{0x2139F0A0u, 0x02DF32E5u, 0xC62A4740u, 0xD0A9877Cu,
                        0x6B692153u, 0x59BDCEE3u, 0xF4F6779Cu, 0xBC3736A2u}};

}  // namespace

Scalar Scalar::reduce(const Limbs256& raw) {
    const Limbs256& n = FieldParams::sm2_n().q;
    if (compare(raw, n) != std::strong_ordering::less)
        return Scalar{sub_with_borrow(raw, n).diff};
    return Scalar{raw};
}

Scalar Scalar::checked(const Limbs256& raw) {
    const Limbs256& n = FieldParams::sm2_n().q;
    if (compare(raw, n) != std::strong_ordering::less)
        throw std::out_of_range("Scalar::checked: value not below group order");
    return Scalar{raw};
}

Scalar Scalar::from_bytes_be(std::span<const std::uint8_t> bytes) {
    return reduce(sm2b::from_bytes_be(bytes));
}

std::array<std::uint8_t, 32> Scalar::to_bytes_be() const {
    return sm2b::to_bytes_be(v);
}

const CurveParams& CurveParams::sm2() {
    static const CurveParams c = [] {
        CurveParams p;
        p.base_field = &FieldParams::sm2_p();
        p.order_field = &FieldParams::sm2_n();
        p.a = to_mont(kA, *p.base_field);
        p.b = to_mont(kB, *p.base_field);
        p.generator = {to_mont(kGx, *p.base_field), to_mont(kGy, *p.base_field),
                       false};
        return p;
    }();
    return c;
}

AffinePoint affine_infinity(const CurveParams& c) {
    return {mont_zero(*c.base_field), mont_zero(*c.base_field), true};
}

bool is_on_curve(const CurveParams& c, const AffinePoint& p) {
    if (p.infinity) return true;
    MontElement lhs = mont_mul(p.y, p.y);
    MontElement x2 = mont_mul(p.x, p.x);
    MontElement rhs = mont_mul(x2, p.x);
    rhs = mod_add(rhs, mont_mul(c.a, p.x));
    rhs = mod_add(rhs, c.b);
    return lhs == rhs;
}

AffinePoint padd_affine(const CurveParams& c, const AffinePoint& p,
                        const AffinePoint& t) {
    if (p.infinity) return t;
    if (t.infinity) return p;
    if (p.x == t.x) {
        if (p.y == t.y)
            throw std::invalid_argument(
                "padd_affine: equal points, use pdbl_affine");
        return affine_infinity(c);  // p + (-p)
    }
    MontElement num = mod_sub(p.y, t.y);
    MontElement den = mod_sub(p.x, t.x);
    MontElement lambda = mont_mul(num, mod_inv_fermat(den));
    MontElement xr = mod_sub(mod_sub(mont_mul(lambda, lambda), p.x), t.x);
    MontElement yr = mod_sub(mont_mul(lambda, mod_sub(p.x, xr)), p.y);
    return {xr, yr, false};
}

AffinePoint pdbl_affine(const CurveParams& c, const AffinePoint& p) {
    if (p.infinity || p.y.is_zero()) return affine_infinity(c);
    MontElement x2 = mont_mul(p.x, p.x);
    MontElement num = mod_add(mod_add(mod_add(x2, x2), x2), c.a);
    MontElement den = mod_add(p.y, p.y);
    MontElement lambda = mont_mul(num, mod_inv_fermat(den));
    MontElement two_x = mod_add(p.x, p.x);
    MontElement xr = mod_sub(mont_mul(lambda, lambda), two_x);
    MontElement yr = mod_sub(mont_mul(lambda, mod_sub(p.x, xr)), p.y);
    return {xr, yr, false};
}

JacobianPoint lift_to_jacobian(const CurveParams& c, const AffinePoint& p) {
    if (p.infinity)
        return {mont_one(*c.base_field), mont_one(*c.base_field),
                mont_zero(*c.base_field)};
    return {p.x, p.y, mont_one(*c.base_field)};
}

JacobianPoint pdbl_jacobian(const CurveParams& c, const JacobianPoint& p) {
    if (p.is_infinity() || p.Y.is_zero())
        return {mont_one(*c.base_field), mont_one(*c.base_field),
                mont_zero(*c.base_field)};
    MontElement yy = mont_mul(p.Y, p.Y);
    MontElement yy2 = mod_add(yy, yy);
    MontElement s = mont_mul(p.X, yy2);       // 2XY^2
    MontElement s4 = mod_add(s, s);           // S = 4XY^2
    MontElement c4 = mont_mul(yy2, yy2);      // 4Y^4
    MontElement c8 = mod_add(c4, c4);         // 8Y^4
    MontElement xx = mont_mul(p.X, p.X);
    MontElement zz = mont_mul(p.Z, p.Z);
    MontElement zz2 = mont_mul(zz, zz);
    MontElement m = mod_add(mod_add(mod_add(xx, xx), xx), mont_mul(c.a, zz2));
    MontElement x3 = mod_sub(mod_sub(mont_mul(m, m), s4), s4);
    MontElement y3 = mod_sub(mont_mul(m, mod_sub(s4, x3)), c8);
    MontElement yz = mont_mul(p.Y, p.Z);
    return {x3, y3, mod_add(yz, yz)};
}

JacobianPoint padd_jacobian(const CurveParams& c, const JacobianPoint& p,
                            const JacobianPoint& t) {
    if (p.is_infinity()) return t;
    if (t.is_infinity()) return p;

    const MontElement one = mont_one(*c.base_field);
    MontElement u1, u2, s1, s2;
    bool mixed = (t.Z == one);
    if (mixed) {
        MontElement z1z1 = mont_mul(p.Z, p.Z);
        u1 = p.X;
        u2 = mont_mul(t.X, z1z1);
        s1 = p.Y;
        s2 = mont_mul(t.Y, mont_mul(z1z1, p.Z));
    } else {
        MontElement z1z1 = mont_mul(p.Z, p.Z);
        MontElement z2z2 = mont_mul(t.Z, t.Z);
        u1 = mont_mul(p.X, z2z2);
        u2 = mont_mul(t.X, z1z1);
        s1 = mont_mul(p.Y, mont_mul(z2z2, t.Z));
        s2 = mont_mul(t.Y, mont_mul(z1z1, p.Z));
    }

    if (u1 == u2) {
        if (s1 == s2) return pdbl_jacobian(c, p);
        return {one, one, mont_zero(*c.base_field)};  // p + (-p)
    }

    MontElement h = mod_sub(u2, u1);
    MontElement r = mod_sub(s2, s1);
    MontElement hh = mont_mul(h, h);
    MontElement hhh = mont_mul(hh, h);
    MontElement v = mont_mul(u1, hh);
    MontElement x3 = mod_sub(mod_sub(mod_sub(mont_mul(r, r), hhh), v), v);
    MontElement y3 = mod_sub(mont_mul(r, mod_sub(v, x3)), mont_mul(s1, hhh));
    MontElement z3 =
        mixed ? mont_mul(p.Z, h) : mont_mul(mont_mul(p.Z, t.Z), h);
    return {x3, y3, z3};
}

AffinePoint jacobian_to_affine(const CurveParams& c, const JacobianPoint& p) {
    if (p.is_infinity()) return affine_infinity(c);
    MontElement zi = mod_inv_fermat(p.Z);
    MontElement zi2 = mont_mul(zi, zi);
    return {mont_mul(p.X, zi2), mont_mul(p.Y, mont_mul(zi2, zi)), false};
}

AffinePoint pmul_serial(const CurveParams& c, const Scalar& s,
                        const AffinePoint& p) {
    JacobianPoint acc = lift_to_jacobian(c, affine_infinity(c));
    JacobianPoint running = lift_to_jacobian(c, p);
    for (std::size_t i = 0; i < 256; ++i) {
        if (s.bit(i)) acc = padd_jacobian(c, acc, running);
        running = pdbl_jacobian(c, running);
    }
    return jacobian_to_affine(c, acc);
}

AffinePoint negate(const CurveParams& c, const AffinePoint& p) {
    if (p.infinity) return p;
    return {p.x, mod_sub(mont_zero(*c.base_field), p.y), false};
}

std::vector<std::uint8_t> encode_point(const AffinePoint& p) {
    if (p.infinity) return {0x00};
    std::vector<std::uint8_t> out(65);
    out[0] = 0x04;
    auto xb = to_bytes_be(from_mont(p.x));
    auto yb = to_bytes_be(from_mont(p.y));
    std::copy(xb.begin(), xb.end(), out.begin() + 1);
    std::copy(yb.begin(), yb.end(), out.begin() + 33);
    return out;
}

AffinePoint decode_point(const CurveParams& c,
                         std::span<const std::uint8_t> bytes) {
    if (bytes.size() == 1 && bytes[0] == 0x00) return affine_infinity(c);
    if (bytes.size() != 65 || bytes[0] != 0x04)
        throw std::invalid_argument("decode_point: malformed encoding");
    Limbs256 x = from_bytes_be(bytes.subspan(1, 32));
    Limbs256 y = from_bytes_be(bytes.subspan(33, 32));
    if (compare(x, c.base_field->q) != std::strong_ordering::less ||
        compare(y, c.base_field->q) != std::strong_ordering::less)
        throw std::invalid_argument("decode_point: coordinate out of range");
    AffinePoint p{to_mont(x, *c.base_field), to_mont(y, *c.base_field), false};
    if (!is_on_curve(c, p))
        throw std::invalid_argument("decode_point: point not on curve");
    return p;
}

}  // namespace sm2b
