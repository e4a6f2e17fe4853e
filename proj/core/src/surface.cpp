#include "wagner/surface.hpp"

#include <algorithm>
#include <cmath>

namespace wagner {

namespace {

double clamp_to_finite(double x, double fallback) {
    if (!std::isfinite(x)) return fallback;
    return x;
}

/// Shrink an FD step so the whole 5-point stencil stays inside open,
/// non-periodic bounds.
double clamp_step(const SurfaceChart& chart, Vec2 p, Vec2 dir, double h) {
    const auto clamp_coord = [&](const DomainInterval& dom, double x, double d, double hh) {
        if (dom.periodic || d == 0.0) return hh;
        const double room = 0.45 * std::min(dom.hi - x, x - dom.lo);
        if (!(room > 0.0)) return hh;  // boundary point; keep h, caller will fail loudly
        return std::min(hh, room / std::abs(d));
    };
    h = clamp_coord(chart.u1_domain(), p.x, dir.x, h);
    h = clamp_coord(chart.u2_domain(), p.y, dir.y, h);
    return std::max(h, 1e-8);
}

}  // namespace

double directional_derivative(const SurfaceChart& chart, Vec2 p, Vec2 dir,
                              const std::function<double(Vec2)>& f, int layer) {
    static constexpr double base_step[3] = {1e-3, 1e-2, 2e-2};
    // only unbounded coordinates widen the step with |x|; periodic or
    // bounded ones have an intrinsic O(1) scale
    const auto unbounded = [](const DomainInterval& dom) {
        return !dom.periodic && (!std::isfinite(dom.lo) || !std::isfinite(dom.hi));
    };
    double scale = 1.0;
    if (unbounded(chart.u1_domain())) scale += std::abs(p.x);
    if (unbounded(chart.u2_domain())) scale = std::max(scale, 1.0 + std::abs(p.y));
    // integrand derivatives grow like inverse powers of the distance to an
    // open chart edge; shrinking the step linearly with that distance keeps
    // the 6th-order truncation at the noise floor. Layer 0 runs on exact
    // integrands and stays truncation-safe without shrinking.
    const auto edge_factor = [&](const DomainInterval& dom, double x) {
        if (dom.periodic || !std::isfinite(dom.lo) || !std::isfinite(dom.hi)) return 1.0;
        const double rel = std::min(dom.hi - x, x - dom.lo) / (dom.hi - dom.lo);
        return std::clamp(2.0 * rel, 0.02, 1.0);
    };
    if (layer >= 1)
        scale *=
            std::min(edge_factor(chart.u1_domain(), p.x), edge_factor(chart.u2_domain(), p.y));

    double h = base_step[std::clamp(layer, 0, 2)] * scale;
    h = clamp_step(chart, p, dir, h);
    const auto at = [&](double s) { return f({p.x + s * dir.x, p.y + s * dir.y}); };
    const auto stencil = [&](double hh) {
        return (-at(2.0 * hh) + 8.0 * at(hh) - 8.0 * at(-hh) + at(-2.0 * hh)) / (12.0 * hh);
    };
    // one Richardson level: 6th-order truncation at the same noise floor
    return (16.0 * stencil(0.5 * h) - stencil(h)) / 15.0;
}

SurfaceChart SurfaceChart::revolution(RevolutionProfile profile) {
    SurfaceChart c;
    c.kind_ = Kind::Revolution;
    c.u1_ = DomainInterval::periodic_interval(0.0, profile.u1_period);
    c.u2_ = profile.u2;
    c.profile_ = std::move(profile);
    c.compute_curvature_scale();
    return c;
}

SurfaceChart SurfaceChart::metric(Expr g11, Expr g12, Expr g22, DomainInterval u1,
                                  DomainInterval u2) {
    SurfaceChart c;
    c.kind_ = Kind::Metric;
    c.g11_ = std::move(g11);
    c.g12_ = std::move(g12);
    c.g22_ = std::move(g22);
    c.u1_ = u1;
    c.u2_ = u2;
    c.compute_curvature_scale();
    return c;
}

SurfaceChart SurfaceChart::embedding(Expr x, Expr y, Expr z, DomainInterval u1,
                                     DomainInterval u2) {
    SurfaceChart c;
    c.kind_ = Kind::Embedding;
    c.embed_x_ = std::move(x);
    c.embed_y_ = std::move(y);
    c.embed_z_ = std::move(z);
    c.u1_ = u1;
    c.u2_ = u2;
    c.compute_curvature_scale();
    return c;
}

void SurfaceChart::compute_curvature_scale() {
    const int n = 33;
    double max_abs_k = 0.0;
    const double u_lo = clamp_to_finite(u1_.lo, -10.0), u_hi = clamp_to_finite(u1_.hi, 10.0);
    const double v_lo = clamp_to_finite(u2_.lo, -10.0), v_hi = clamp_to_finite(u2_.hi, 10.0);
    const double du = (u_hi - u_lo), dv = (v_hi - v_lo);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Vec2 p{u_lo + du * (i + 0.5) / n, v_lo + dv * (j + 0.5) / n};
            try {
                max_abs_k = std::max(max_abs_k, std::abs(curvature(*this, p)));
            } catch (const NumericalError&) {
                // degenerate samples near chart edges do not contribute
            }
        }
    k_scale_ = std::max(1.0, max_abs_k);
}

Mat2 SurfaceChart::metric_at(Vec2 p) const {
    Deriv1 g11, g12, g22;
    metric_deriv1(p, g11, g12, g22);
    Mat2 g{g11.f, g12.f, g22.f};
    if (!(g.a11 > 0.0) || !(g.det() > 0.0))
        throw DegenerateMetric("metric not positive definite at (" + std::to_string(p.x) +
                               ", " + std::to_string(p.y) + ")");
    return g;
}

void SurfaceChart::metric_deriv1(Vec2 p, Deriv1& g11, Deriv1& g12, Deriv1& g22) const {
    Deriv2 a, b, c;
    metric_deriv2(p, a, b, c);
    g11 = value_part(a);
    g12 = value_part(b);
    g22 = value_part(c);
}

void SurfaceChart::metric_deriv2(Vec2 p, Deriv2& g11, Deriv2& g12, Deriv2& g22) const {
    switch (kind_) {
        case Kind::Revolution: {
            const Jet3 a = profile_.jet(p.y);
            if (!(a.value > 0.0))
                throw DegenerateMetric("profile A(u2) must be positive, got A(" +
                                       std::to_string(p.y) + ") = " + std::to_string(a.value));
            g11 = Deriv2{a.value * a.value, 0.0, 2.0 * a.value * a.d1, 0.0, 0.0,
                         2.0 * (a.d1 * a.d1 + a.value * a.d2)};
            g12 = Deriv2{0.0};
            g22 = Deriv2{1.0};
            return;
        }
        case Kind::Metric:
            g11 = value_part(eval_jet2(g11_, p.x, p.y));
            g12 = value_part(eval_jet2(g12_, p.x, p.y));
            g22 = value_part(eval_jet2(g22_, p.x, p.y));
            return;
        case Kind::Embedding: {
            const Jet2 xs[3] = {eval_jet2(embed_x_, p.x, p.y), eval_jet2(embed_y_, p.x, p.y),
                                eval_jet2(embed_z_, p.x, p.y)};
            g11 = Deriv2{0.0};
            g12 = Deriv2{0.0};
            g22 = Deriv2{0.0};
            for (const Jet2& c : xs) {
                const Deriv2 cu = du_part(c);
                const Deriv2 cv = dv_part(c);
                g11 = g11 + cu * cu;
                g12 = g12 + cu * cv;
                g22 = g22 + cv * cv;
            }
            return;
        }
    }
}

FrameCoreD frame_core_d(const SurfaceChart& chart, Vec2 p) {
    if (chart.kind() == SurfaceChart::Kind::Revolution) {
        const Jet3 a = chart.profile()->jet(p.y);
        if (!(a.value > 0.0))
            throw DegenerateMetric("profile A(u2) must be positive at u2 = " +
                                   std::to_string(p.y));
        FrameCoreD fc;
        fc.e1 = {1.0 / a.value, 0.0};
        fc.e2 = {0.0, 1.0};
        // [e1,e2] = (A'/A) e1, with d/dv (A'/A) = (A''A - A'^2)/A^2
        fc.c112 = {a.d1 / a.value, 0.0,
                   (a.d2 * a.value - a.d1 * a.d1) / (a.value * a.value)};
        fc.c212 = {0.0, 0.0, 0.0};
        return fc;
    }

    Deriv2 g11, g12, g22;
    chart.metric_deriv2(p, g11, g12, g22);
    const Deriv2 det = g11 * g22 - g12 * g12;
    if (!(g11.f > 0.0) || !(det.f > 0.0))
        throw DegenerateMetric("metric not positive definite at (" + std::to_string(p.x) +
                               ", " + std::to_string(p.y) + ")");

    // Gram-Schmidt with e1 along d1; positively oriented since det > 0.
    const Deriv2 e11 = Deriv2{1.0} / sqrt(g11);
    const Deriv2 e21 = -g12 / sqrt(g11 * det);
    const Deriv2 e22 = sqrt(g11 / det);

    // [e1,e2]^k = e1 . grad(e2^k) - e2 . grad(e1^k); e1^2 = 0 identically.
    // Carried in first-order arithmetic so the bracket keeps exact partials.
    const Deriv1 v11 = value_part(e11), v21 = value_part(e21), v22 = value_part(e22);
    const Deriv1 br1 = v11 * du_part(e21) - (v21 * du_part(e11) + v22 * dv_part(e11));
    const Deriv1 br2 = v11 * du_part(e22);

    // Expand in the frame: bracket = c112 e1 + c212 e2.
    const Deriv1 det_m = v11 * v22;
    FrameCoreD fc;
    fc.e1 = {e11.f, 0.0};
    fc.e2 = {e21.f, e22.f};
    fc.c112 = (br1 * v22 - br2 * v21) / det_m;
    fc.c212 = (v11 * br2) / det_m;
    return fc;
}

FrameCore frame_core(const SurfaceChart& chart, Vec2 p) {
    if (chart.kind() == SurfaceChart::Kind::Revolution) {
        const Jet3 a = chart.profile()->jet(p.y);
        if (!(a.value > 0.0))
            throw DegenerateMetric("profile A(u2) must be positive at u2 = " +
                                   std::to_string(p.y));
        FrameCore fc;
        fc.e1 = {1.0 / a.value, 0.0};
        fc.e2 = {0.0, 1.0};
        fc.c112 = a.d1 / a.value;  // [e1,e2] = (A'/A) e1
        fc.c212 = 0.0;
        return fc;
    }
    const FrameCoreD fd = frame_core_d(chart, p);
    return {fd.e1, fd.e2, fd.c112.f, fd.c212.f};
}

double curvature(const SurfaceChart& chart, Vec2 p) {
    if (chart.kind() == SurfaceChart::Kind::Revolution) {
        const Jet3 a = chart.profile()->jet(p.y);
        if (!(a.value > 0.0))
            throw DegenerateMetric("profile A(u2) must be positive at u2 = " +
                                   std::to_string(p.y));
        return -a.d2 / a.value;
    }

    // K = -( e2 c112 - e1 c212 + c112^2 + c212^2 ), from the curvature of
    // the orthonormal frame expressed through its structure functions; the
    // frame derivatives of c come out of the jet pipeline exactly.
    const FrameCoreD fc = frame_core_d(chart, p);
    const double e2c1 = fc.e2.x * fc.c112.fu + fc.e2.y * fc.c112.fv;
    const double e1c2 = fc.e1.x * fc.c212.fu + fc.e1.y * fc.c212.fv;
    return -(e2c1 - e1c2 + fc.c112.f * fc.c112.f + fc.c212.f * fc.c212.f);
}

Vec2 grad_curvature(const SurfaceChart& chart, Vec2 p) {
    if (chart.kind() == SurfaceChart::Kind::Revolution) {
        const Jet3 a = chart.profile()->jet(p.y);
        if (!(a.value > 0.0))
            throw DegenerateMetric("profile A(u2) must be positive at u2 = " +
                                   std::to_string(p.y));
        // K' = (-A''' A + A'' A') / A^2
        return {0.0, (-a.d3 * a.value + a.d2 * a.d1) / (a.value * a.value)};
    }

    const FrameCore fc = frame_core(chart, p);
    const auto k = [&chart](Vec2 q) { return curvature(chart, q); };
    return {directional_derivative(chart, p, fc.e1, k, 0),
            directional_derivative(chart, p, fc.e2, k, 0)};
}

CurvatureSecondDerivs second_curvature_derivs(const SurfaceChart& chart, Vec2 p) {
    const double K = curvature(chart, p);
    if (std::abs(K) < singular_guard(chart))
        throw SingularPoint("curvature vanishes at (" + std::to_string(p.x) + ", " +
                            std::to_string(p.y) + ")");

    CurvatureSecondDerivs out{};
    if (chart.kind() == SurfaceChart::Kind::Revolution) {
        // e1 K = 0 on revolution charts, so only e2(e2K/K) survives; its
        // inner function is jet-exact, one FD layer suffices.
        const auto ratio = [&chart](Vec2 q) {
            return grad_curvature(chart, q).y / curvature(chart, q);
        };
        out.d2[0][0] = 0.0;
        out.d2[0][1] = 0.0;
        out.d2[1][0] = 0.0;
        out.d2[1][1] = directional_derivative(chart, p, {0.0, 1.0}, ratio, 0);
        return out;
    }

    const FrameCore fc = frame_core(chart, p);
    const auto ratio = [&chart](int comp) {
        return [&chart, comp](Vec2 q) {
            const double kq = curvature(chart, q);
            const Vec2 gk = grad_curvature(chart, q);
            return (comp == 0 ? gk.x : gk.y) / kq;
        };
    };
    const std::function<double(Vec2)> p_fn = ratio(0), r_fn = ratio(1);
    out.d2[0][0] = directional_derivative(chart, p, fc.e1, p_fn, 1);
    out.d2[0][1] = directional_derivative(chart, p, fc.e1, r_fn, 1);
    out.d2[1][0] = directional_derivative(chart, p, fc.e2, p_fn, 1);
    out.d2[1][1] = directional_derivative(chart, p, fc.e2, r_fn, 1);
    return out;
}

void christoffel_from_structure(double c112, double c212, double gamma[2][2][2]) {
    const double cval[2] = {c112, c212};
    const auto c = [&cval](int k, int i, int j) {
        if (i == 0 && j == 1) return cval[k];
        if (i == 1 && j == 0) return -cval[k];
        return 0.0;
    };
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                gamma[k][i][j] = 0.5 * (c(k, i, j) + c(j, k, i) + c(i, k, j));
}

FramePointData frame_data(const SurfaceChart& chart, Vec2 p) {
    FramePointData d;
    d.point = p;
    const FrameCore fc = frame_core(chart, p);
    d.e1 = fc.e1;
    d.e2 = fc.e2;
    d.c112 = fc.c112;
    d.c212 = fc.c212;
    d.K = curvature(chart, p);
    d.gradK = grad_curvature(chart, p);
    christoffel_from_structure(d.c112, d.c212, d.christoffel);
    return d;
}

bool SurfaceChart::has_embedding() const { return kind_ != Kind::Metric; }

Vec3 SurfaceChart::embed_point(Vec2 p) const {
    switch (kind_) {
        case Kind::Embedding:
            return {eval(embed_x_, p.x, p.y), eval(embed_y_, p.x, p.y),
                    eval(embed_z_, p.x, p.y)};
        case Kind::Revolution: {
            // (A(v) cos u, A(v) sin u, z(v)) with z' = sqrt(1 - A'^2).
            const double a = profile_.jet(p.y).value;
            const double v_ref = std::isfinite(u2_.lo) ? u2_.lo : 0.0;
            const int n = 200;
            const double dv = (p.y - v_ref) / n;
            double z = 0.0;
            for (int i = 0; i < n; ++i) {
                const auto zp = [&](double v) {
                    const double ap = profile_.jet(v).d1;
                    return std::sqrt(std::max(0.0, 1.0 - ap * ap));
                };
                const double v0 = v_ref + i * dv;
                z += dv / 6.0 * (zp(v0) + 4.0 * zp(v0 + 0.5 * dv) + zp(v0 + dv));
            }
            return {a * std::cos(p.x), a * std::sin(p.x), z};
        }
        case Kind::Metric: break;
    }
    return {0.0, 0.0, 0.0};
}

}  // namespace wagner
