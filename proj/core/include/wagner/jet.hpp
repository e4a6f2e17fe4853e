#pragma once
#include <cmath>

#include "wagner/errors.hpp"

namespace wagner {

/// Truncated Taylor jet in one variable: value and derivatives to order 3.
///
/// Arithmetic satisfies the Leibniz rule exactly at the algebra level, e.g.
/// (a*b).d1 == a.d1*b.value + a.value*b.d1 bit for bit.
struct Jet3 {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;

    Jet3() = default;
    Jet3(double v) : value(v) {}
    Jet3(double v, double a, double b = 0.0, double c = 0.0) : value(v), d1(a), d2(b), d3(c) {}

    /// Independent variable seed: d/dt of t is 1.
    static Jet3 variable(double v) { return {v, 1.0, 0.0, 0.0}; }

    Jet3 operator-() const { return {-value, -d1, -d2, -d3}; }

    Jet3 operator+(const Jet3& o) const {
        return {value + o.value, d1 + o.d1, d2 + o.d2, d3 + o.d3};
    }
    Jet3 operator-(const Jet3& o) const {
        return {value - o.value, d1 - o.d1, d2 - o.d2, d3 - o.d3};
    }
    Jet3 operator*(const Jet3& o) const {
        return {value * o.value,
                d1 * o.value + value * o.d1,
                d2 * o.value + 2.0 * d1 * o.d1 + value * o.d2,
                d3 * o.value + 3.0 * d2 * o.d1 + 3.0 * d1 * o.d2 + value * o.d3};
    }
    Jet3 operator/(const Jet3& o) const;

    Jet3& operator+=(const Jet3& o) { return *this = *this + o; }
    Jet3& operator-=(const Jet3& o) { return *this = *this - o; }
    Jet3& operator*=(const Jet3& o) { return *this = *this * o; }
};

/// Compose f with an inner jet a given f(a.value) and its first three
/// derivatives there (Faa di Bruno through order 3).
inline Jet3 jet_compose(double f0, double f1, double f2, double f3, const Jet3& a) {
    return {f0,
            f1 * a.d1,
            f2 * a.d1 * a.d1 + f1 * a.d2,
            f3 * a.d1 * a.d1 * a.d1 + 3.0 * f2 * a.d1 * a.d2 + f1 * a.d3};
}

inline Jet3 Jet3::operator/(const Jet3& o) const {
    if (o.value == 0.0) throw DomainError("division by zero");
    const double x = o.value;
    const Jet3 inv = jet_compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x),
                                 -6.0 / (x * x * x * x), o);
    return *this * inv;
}

inline Jet3 sin(const Jet3& a) {
    const double s = std::sin(a.value), c = std::cos(a.value);
    return jet_compose(s, c, -s, -c, a);
}
inline Jet3 cos(const Jet3& a) {
    const double s = std::sin(a.value), c = std::cos(a.value);
    return jet_compose(c, -s, -c, s, a);
}
inline Jet3 tan(const Jet3& a) {
    const double c = std::cos(a.value);
    if (c == 0.0) throw DomainError("tan at a pole");
    const double t = std::tan(a.value), s2 = 1.0 + t * t;
    return jet_compose(t, s2, 2.0 * t * s2, s2 * (2.0 + 6.0 * t * t), a);
}
inline Jet3 exp(const Jet3& a) {
    const double e = std::exp(a.value);
    return jet_compose(e, e, e, e, a);
}
inline Jet3 log(const Jet3& a) {
    if (a.value <= 0.0) throw DomainError("log of non-positive value");
    const double x = a.value;
    return jet_compose(std::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), a);
}
inline Jet3 sqrt(const Jet3& a) {
    if (a.value <= 0.0) throw DomainError("sqrt of non-positive value in jet");
    const double r = std::sqrt(a.value);
    return jet_compose(r, 0.5 / r, -0.25 / (r * a.value), 0.375 / (r * a.value * a.value), a);
}
inline Jet3 sinh(const Jet3& a) {
    const double s = std::sinh(a.value), c = std::cosh(a.value);
    return jet_compose(s, c, s, c, a);
}
inline Jet3 cosh(const Jet3& a) {
    const double s = std::sinh(a.value), c = std::cosh(a.value);
    return jet_compose(c, s, c, s, a);
}
inline Jet3 tanh(const Jet3& a) {
    const double t = std::tanh(a.value), s = 1.0 - t * t;
    return jet_compose(t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0), a);
}
inline Jet3 abs(const Jet3& a) {
    const double s = a.value > 0.0 ? 1.0 : (a.value < 0.0 ? -1.0 : 0.0);
    return {std::abs(a.value), s * a.d1, s * a.d2, s * a.d3};
}

/// Integer power by repeated multiplication; valid for any base sign.
inline Jet3 powi(Jet3 a, long n) {
    if (n < 0) return Jet3(1.0) / powi(a, -n);
    Jet3 r(1.0);
    while (n > 0) {
        if (n & 1) r *= a;
        a *= a;
        n >>= 1;
    }
    return r;
}

inline Jet3 pow(const Jet3& a, double p) {
    if (p == std::rint(p) && std::abs(p) <= 64.0) return powi(a, static_cast<long>(p));
    if (a.value <= 0.0) throw DomainError("pow with non-positive base and non-integer exponent");
    const double x = a.value, f0 = std::pow(x, p);
    return jet_compose(f0, p * f0 / x, p * (p - 1.0) * f0 / (x * x),
                       p * (p - 1.0) * (p - 2.0) * f0 / (x * x * x), a);
}
inline Jet3 pow(const Jet3& a, const Jet3& b) {
    if (b.d1 == 0.0 && b.d2 == 0.0 && b.d3 == 0.0) return pow(a, b.value);
    return exp(b * log(a));
}

/// Two-variable jet carrying all partials to total order 3 (the frame
/// pipeline needs exact second derivatives of induced metrics, which pull
/// in the mixed third-order partials of embeddings).
struct Jet2 {
    double f = 0.0;
    double fu = 0.0, fv = 0.0;
    double fuu = 0.0, fuv = 0.0, fvv = 0.0;
    double fuuu = 0.0, fuuv = 0.0, fuvv = 0.0, fvvv = 0.0;

    Jet2() = default;
    Jet2(double v) : f(v) {}

    static Jet2 var_u(double u0) {
        Jet2 r(u0);
        r.fu = 1.0;
        return r;
    }
    static Jet2 var_v(double v0) {
        Jet2 r(v0);
        r.fv = 1.0;
        return r;
    }

    Jet2 operator-() const {
        Jet2 r;
        r.f = -f; r.fu = -fu; r.fv = -fv;
        r.fuu = -fuu; r.fuv = -fuv; r.fvv = -fvv;
        r.fuuu = -fuuu; r.fuuv = -fuuv; r.fuvv = -fuvv; r.fvvv = -fvvv;
        return r;
    }
    Jet2 operator+(const Jet2& o) const {
        Jet2 r;
        r.f = f + o.f; r.fu = fu + o.fu; r.fv = fv + o.fv;
        r.fuu = fuu + o.fuu; r.fuv = fuv + o.fuv; r.fvv = fvv + o.fvv;
        r.fuuu = fuuu + o.fuuu; r.fuuv = fuuv + o.fuuv;
        r.fuvv = fuvv + o.fuvv; r.fvvv = fvvv + o.fvvv;
        return r;
    }
    Jet2 operator-(const Jet2& o) const { return *this + (-o); }
    Jet2 operator*(const Jet2& o) const {
        Jet2 r;
        r.f = f * o.f;
        r.fu = fu * o.f + f * o.fu;
        r.fv = fv * o.f + f * o.fv;
        r.fuu = fuu * o.f + 2.0 * fu * o.fu + f * o.fuu;
        r.fvv = fvv * o.f + 2.0 * fv * o.fv + f * o.fvv;
        r.fuv = fuv * o.f + fu * o.fv + fv * o.fu + f * o.fuv;
        r.fuuu = fuuu * o.f + 3.0 * fuu * o.fu + 3.0 * fu * o.fuu + f * o.fuuu;
        r.fvvv = fvvv * o.f + 3.0 * fvv * o.fv + 3.0 * fv * o.fvv + f * o.fvvv;
        r.fuuv = fuuv * o.f + fuu * o.fv + 2.0 * fuv * o.fu + 2.0 * fu * o.fuv +
                 fv * o.fuu + f * o.fuuv;
        r.fuvv = fuvv * o.f + fvv * o.fu + 2.0 * fuv * o.fv + 2.0 * fv * o.fuv +
                 fu * o.fvv + f * o.fuvv;
        return r;
    }
    Jet2 operator/(const Jet2& o) const;

    Jet2& operator+=(const Jet2& o) { return *this = *this + o; }
    Jet2& operator*=(const Jet2& o) { return *this = *this * o; }
};

inline Jet2 jet_compose(double f0, double f1, double f2, double f3, const Jet2& a) {
    Jet2 r;
    r.f = f0;
    r.fu = f1 * a.fu;
    r.fv = f1 * a.fv;
    r.fuu = f2 * a.fu * a.fu + f1 * a.fuu;
    r.fuv = f2 * a.fu * a.fv + f1 * a.fuv;
    r.fvv = f2 * a.fv * a.fv + f1 * a.fvv;
    r.fuuu = f3 * a.fu * a.fu * a.fu + 3.0 * f2 * a.fu * a.fuu + f1 * a.fuuu;
    r.fvvv = f3 * a.fv * a.fv * a.fv + 3.0 * f2 * a.fv * a.fvv + f1 * a.fvvv;
    r.fuuv = f3 * a.fu * a.fu * a.fv + f2 * (2.0 * a.fu * a.fuv + a.fv * a.fuu) +
             f1 * a.fuuv;
    r.fuvv = f3 * a.fu * a.fv * a.fv + f2 * (2.0 * a.fv * a.fuv + a.fu * a.fvv) +
             f1 * a.fuvv;
    return r;
}

inline Jet2 Jet2::operator/(const Jet2& o) const {
    if (o.f == 0.0) throw DomainError("division by zero");
    const double x = o.f;
    return *this * jet_compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x),
                               -6.0 / (x * x * x * x), o);
}

inline Jet2 sin(const Jet2& a) {
    const double s = std::sin(a.f), c = std::cos(a.f);
    return jet_compose(s, c, -s, -c, a);
}
inline Jet2 cos(const Jet2& a) {
    const double s = std::sin(a.f), c = std::cos(a.f);
    return jet_compose(c, -s, -c, s, a);
}
inline Jet2 tan(const Jet2& a) {
    const double c = std::cos(a.f);
    if (c == 0.0) throw DomainError("tan at a pole");
    const double t = std::tan(a.f), s2 = 1.0 + t * t;
    return jet_compose(t, s2, 2.0 * t * s2, s2 * (2.0 + 6.0 * t * t), a);
}
inline Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.f);
    return jet_compose(e, e, e, e, a);
}
inline Jet2 log(const Jet2& a) {
    if (a.f <= 0.0) throw DomainError("log of non-positive value");
    const double x = a.f;
    return jet_compose(std::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), a);
}
inline Jet2 sqrt(const Jet2& a) {
    if (a.f <= 0.0) throw DomainError("sqrt of non-positive value in jet");
    const double r = std::sqrt(a.f);
    return jet_compose(r, 0.5 / r, -0.25 / (r * a.f), 0.375 / (r * a.f * a.f), a);
}
inline Jet2 sinh(const Jet2& a) {
    const double s = std::sinh(a.f), c = std::cosh(a.f);
    return jet_compose(s, c, s, c, a);
}
inline Jet2 cosh(const Jet2& a) {
    const double s = std::sinh(a.f), c = std::cosh(a.f);
    return jet_compose(c, s, c, s, a);
}
inline Jet2 tanh(const Jet2& a) {
    const double t = std::tanh(a.f), s = 1.0 - t * t;
    return jet_compose(t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0), a);
}
inline Jet2 abs(const Jet2& a) {
    const double s = a.f > 0.0 ? 1.0 : (a.f < 0.0 ? -1.0 : 0.0);
    Jet2 r;
    r.f = std::abs(a.f);
    r.fu = s * a.fu; r.fv = s * a.fv;
    r.fuu = s * a.fuu; r.fuv = s * a.fuv; r.fvv = s * a.fvv;
    r.fuuu = s * a.fuuu; r.fuuv = s * a.fuuv; r.fuvv = s * a.fuvv; r.fvvv = s * a.fvvv;
    return r;
}
inline Jet2 powi(Jet2 a, long n) {
    if (n < 0) return Jet2(1.0) / powi(a, -n);
    Jet2 r(1.0);
    while (n > 0) {
        if (n & 1) r *= a;
        a *= a;
        n >>= 1;
    }
    return r;
}
inline Jet2 pow(const Jet2& a, double p) {
    if (p == std::rint(p) && std::abs(p) <= 64.0) return powi(a, static_cast<long>(p));
    if (a.f <= 0.0) throw DomainError("pow with non-positive base and non-integer exponent");
    const double x = a.f, f0 = std::pow(x, p);
    return jet_compose(f0, p * f0 / x, p * (p - 1.0) * f0 / (x * x),
                       p * (p - 1.0) * (p - 2.0) * f0 / (x * x * x), a);
}
inline Jet2 pow(const Jet2& a, const Jet2& b) {
    const bool b_const = b.fu == 0.0 && b.fv == 0.0 && b.fuu == 0.0 && b.fuv == 0.0 &&
                         b.fvv == 0.0 && b.fuuu == 0.0 && b.fuuv == 0.0 &&
                         b.fuvv == 0.0 && b.fvvv == 0.0;
    if (b_const) return pow(a, b.f);
    return exp(b * log(a));
}

/// Value plus first partials only; the workhorse for frame fields whose
/// higher derivatives are not available in closed form.
struct Deriv1 {
    double f = 0.0, fu = 0.0, fv = 0.0;

    Deriv1() = default;
    Deriv1(double v) : f(v) {}
    Deriv1(double v, double du, double dv) : f(v), fu(du), fv(dv) {}

    Deriv1 operator-() const { return {-f, -fu, -fv}; }
    Deriv1 operator+(const Deriv1& o) const { return {f + o.f, fu + o.fu, fv + o.fv}; }
    Deriv1 operator-(const Deriv1& o) const { return {f - o.f, fu - o.fu, fv - o.fv}; }
    Deriv1 operator*(const Deriv1& o) const {
        return {f * o.f, fu * o.f + f * o.fu, fv * o.f + f * o.fv};
    }
    Deriv1 operator/(const Deriv1& o) const {
        if (o.f == 0.0) throw DomainError("division by zero");
        const double q = f / o.f;
        return {q, (fu - q * o.fu) / o.f, (fv - q * o.fv) / o.f};
    }
};

inline Deriv1 sqrt(const Deriv1& a) {
    if (a.f <= 0.0) throw DomainError("sqrt of non-positive value");
    const double r = std::sqrt(a.f);
    return {r, 0.5 * a.fu / r, 0.5 * a.fv / r};
}

/// Value plus partials to total order 2; carries the frame pipeline far
/// enough that structure functions come out with exact first derivatives.
struct Deriv2 {
    double f = 0.0, fu = 0.0, fv = 0.0;
    double fuu = 0.0, fuv = 0.0, fvv = 0.0;

    Deriv2() = default;
    Deriv2(double v) : f(v) {}
    Deriv2(double v, double du, double dv, double duu, double duv, double dvv)
        : f(v), fu(du), fv(dv), fuu(duu), fuv(duv), fvv(dvv) {}

    Deriv2 operator-() const { return {-f, -fu, -fv, -fuu, -fuv, -fvv}; }
    Deriv2 operator+(const Deriv2& o) const {
        return {f + o.f, fu + o.fu, fv + o.fv, fuu + o.fuu, fuv + o.fuv, fvv + o.fvv};
    }
    Deriv2 operator-(const Deriv2& o) const { return *this + (-o); }
    Deriv2 operator*(const Deriv2& o) const {
        return {f * o.f,
                fu * o.f + f * o.fu,
                fv * o.f + f * o.fv,
                fuu * o.f + 2.0 * fu * o.fu + f * o.fuu,
                fuv * o.f + fu * o.fv + fv * o.fu + f * o.fuv,
                fvv * o.f + 2.0 * fv * o.fv + f * o.fvv};
    }
    Deriv2 operator/(const Deriv2& o) const;
};

inline Deriv2 deriv2_compose(double f0, double f1, double f2, const Deriv2& a) {
    return {f0,
            f1 * a.fu,
            f1 * a.fv,
            f2 * a.fu * a.fu + f1 * a.fuu,
            f2 * a.fu * a.fv + f1 * a.fuv,
            f2 * a.fv * a.fv + f1 * a.fvv};
}

inline Deriv2 Deriv2::operator/(const Deriv2& o) const {
    if (o.f == 0.0) throw DomainError("division by zero");
    const double x = o.f;
    return *this * deriv2_compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), o);
}

inline Deriv2 sqrt(const Deriv2& a) {
    if (a.f <= 0.0) throw DomainError("sqrt of non-positive value");
    const double r = std::sqrt(a.f);
    return deriv2_compose(r, 0.5 / r, -0.25 / (r * a.f), a);
}

/// The value-and-gradient slice of a second-order carrier.
inline Deriv1 value_part(const Deriv2& a) { return {a.f, a.fu, a.fv}; }

/// First partials of a second-order carrier, as first-order carriers.
inline Deriv1 du_part(const Deriv2& a) { return {a.fu, a.fuu, a.fuv}; }
inline Deriv1 dv_part(const Deriv2& a) { return {a.fv, a.fuv, a.fvv}; }

/// Second-order slices of a full two-variable jet and of its partials.
inline Deriv2 value_part(const Jet2& a) { return {a.f, a.fu, a.fv, a.fuu, a.fuv, a.fvv}; }
inline Deriv2 du_part(const Jet2& a) { return {a.fu, a.fuu, a.fuv, a.fuuu, a.fuuv, a.fuvv}; }
inline Deriv2 dv_part(const Jet2& a) { return {a.fv, a.fuv, a.fvv, a.fuuv, a.fuvv, a.fvvv}; }

}  // namespace wagner
