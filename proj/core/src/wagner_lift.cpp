#include "wagner/wagner_lift.hpp"

#include <algorithm>
#include <cmath>

namespace wagner {

namespace {

int pair_index(int i, int j, double& sign) {
    sign = 1.0;
    if (i == j) return -1;
    if (i > j) {
        std::swap(i, j);
        sign = -1.0;
    }
    if (i == 0 && j == 1) return 0;
    if (i == 0 && j == 2) return 1;
    return 2;  // (1,2)
}

void check_nonsingular(const SurfaceChart& chart, Vec2 p, double K) {
    if (std::abs(K) < singular_guard(chart))
        throw SingularPoint("point lies on the singular set (K = " + std::to_string(K) +
                            " at u2 = " + std::to_string(p.y) + ")");
}

void fill_c_hat(double a, double b, double P, double R, double c[3][3][3]) {
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) c[k][i][j] = 0.0;
    const auto set = [&](int k, int i, int j, double v) {
        c[k][i][j] = v;
        c[k][j][i] = -v;
    };
    set(0, 0, 1, a);  // chat^1_12 = c^1_12
    set(1, 0, 1, b);  // chat^2_12 = c^2_12
    set(2, 0, 1, 1.0);
    set(2, 0, 2, P);  // e1 K / K
    set(2, 1, 2, R);  // e2 K / K
}

void fill_gamma_hat(double a, double b, double P, double R, double g[3][3][3]) {
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g[k][i][j] = 0.0;
    // closed-form entries, extended by antisymmetry in (upper, last lower)
    const auto set = [&](int k, int i, int j, double v) {
        g[k][i][j] = v;
        g[j][i][k] = -v;
    };
    set(0, 0, 1, a);    // Ghat^1_12
    set(0, 1, 1, b);    // Ghat^1_22
    set(0, 2, 1, 0.5);  // Ghat^1_32
    set(0, 1, 2, 0.5);  // Ghat^1_23
    set(1, 0, 2, -0.5); // Ghat^2_13
    set(0, 2, 2, P);    // Ghat^1_33
    set(1, 2, 2, R);    // Ghat^2_33
}

struct LiftScalars {
    double a, b, K, P, R;
};

LiftScalars lift_scalars(const SurfaceChart& chart, Vec2 p) {
    const FrameCore fc = frame_core(chart, p);
    const double K = curvature(chart, p);
    check_nonsingular(chart, p, K);
    const Vec2 gk = grad_curvature(chart, p);
    return {fc.c112, fc.c212, K, gk.x / K, gk.y / K};
}

Vec3 lift_field_component(const SurfaceChart& chart, int i, double u1, double u2) {
    const FrameCore fc = frame_core(chart, {u1, u2});
    switch (i) {
        case 0: return {fc.e1.x, fc.e1.y, fc.c112};
        case 1: return {fc.e2.x, fc.e2.y, fc.c212};
        default: return {0.0, 0.0, curvature(chart, {u1, u2})};
    }
}

/// Central 4th-order partial derivative of a coordinate field along one of
/// (u1, u2, phi).
Vec3 field_partial(const std::function<Vec3(double, double, double)>& f, double u1, double u2,
                   double phi, int m) {
    const double x = m == 0 ? u1 : (m == 1 ? u2 : phi);
    const double h = 1e-4 * (1.0 + std::abs(x));
    const auto at = [&](double s) {
        switch (m) {
            case 0: return f(u1 + s, u2, phi);
            case 1: return f(u1, u2 + s, phi);
            default: return f(u1, u2, phi + s);
        }
    };
    const Vec3 r = at(-2.0 * h) - at(2.0 * h) + 8.0 * (at(h) - at(-h));
    return (1.0 / (12.0 * h)) * r;
}

Vec3 fd_bracket(const std::function<Vec3(double, double, double)>& X,
                const std::function<Vec3(double, double, double)>& Y, double u1, double u2,
                double phi) {
    const Vec3 xv = X(u1, u2, phi), yv = Y(u1, u2, phi);
    Vec3 out{};
    for (int m = 0; m < 3; ++m) {
        const Vec3 dy = field_partial(Y, u1, u2, phi, m);
        const Vec3 dx = field_partial(X, u1, u2, phi, m);
        const double xm = xv[m], ym = yv[m];
        out = out + xm * dy - ym * dx;
    }
    return out;
}

}  // namespace

double RhatComponents::full(int i, int j, int k, int l) const {
    double s1, s2;
    const int a = pair_index(i, j, s1);
    const int b = pair_index(k, l, s2);
    if (a < 0 || b < 0) return 0.0;
    const double m[3][3] = {{r1212, r1213, r1223}, {r1213, r1313, r1323}, {r1223, r1323, r2323}};
    return s1 * s2 * m[a][b];
}

LiftPointData lift_frame(const SurfaceChart& chart, Vec2 p, double phi) {
    LiftPointData d;
    d.base = frame_data(chart, p);
    d.phi = phi;
    d.E1 = {d.base.e1.x, d.base.e1.y, d.base.c112};
    d.E2 = {d.base.e2.x, d.base.e2.y, d.base.c212};
    d.E3 = {0.0, 0.0, d.base.K};
    d.singular = std::abs(d.base.K) < singular_guard(chart);
    if (!d.singular) {
        const double P = d.base.gradK.x / d.base.K, R = d.base.gradK.y / d.base.K;
        fill_c_hat(d.base.c112, d.base.c212, P, R, d.c_hat);
        fill_gamma_hat(d.base.c112, d.base.c212, P, R, d.gamma_hat);
        d.r_hat = lift_curvature(chart, p);
    }
    return d;
}

double nonholonomity(const SurfaceChart& chart, Vec2 p) { return curvature(chart, p); }

void lift_structure_functions(const SurfaceChart& chart, Vec2 p, double c_hat[3][3][3]) {
    const LiftScalars s = lift_scalars(chart, p);
    fill_c_hat(s.a, s.b, s.P, s.R, c_hat);
}

void lift_connection(const SurfaceChart& chart, Vec2 p, double gamma_hat[3][3][3]) {
    const LiftScalars s = lift_scalars(chart, p);
    fill_gamma_hat(s.a, s.b, s.P, s.R, gamma_hat);
}

RhatComponents lift_curvature(const SurfaceChart& chart, Vec2 p) {
    const LiftScalars s = lift_scalars(chart, p);
    const CurvatureSecondDerivs d2 = second_curvature_derivs(chart, p);
    const double e1P = d2.d2[0][0], e1R = d2.d2[0][1], e2R = d2.d2[1][1];
    RhatComponents r;
    r.r1212 = 0.75 - s.K;
    r.r1213 = s.P;
    r.r1223 = s.R;
    r.r1313 = -0.25 - e1P - s.a * s.R + s.P * s.P;
    r.r1323 = -e1R + s.a * s.P + s.P * s.R;
    r.r2323 = -0.25 - e2R + s.b * s.P + s.R * s.R;
    return r;
}

Mat3 ghat_coord(const SurfaceChart& chart, Vec2 p) {
    const double K = curvature(chart, p);
    check_nonsingular(chart, p, K);
    const LiftPointData d = lift_frame(chart, p, 0.0);
    const Mat3 B = Mat3::from_columns(d.E1, d.E2, d.E3);
    return (B * B.transpose()).inverse();
}

Mat3 ghat_dual_coord(const SurfaceChart& chart, Vec2 p) {
    const LiftPointData d = lift_frame(chart, p, 0.0);
    const Mat3 B = Mat3::from_columns(d.E1, d.E2, d.E3);
    return B * B.transpose();
}

double lie_derivative_residual(const SurfaceChart& chart, const CoordField& field, Vec2 p,
                               double phi) {
    const double K = curvature(chart, p);
    check_nonsingular(chart, p, K);

    const auto E = [&chart](int i) {
        return [&chart, i](double u1, double u2, double) {
            return lift_field_component(chart, i, u1, u2);
        };
    };
    const LiftPointData d = lift_frame(chart, p, phi);
    const Mat3 Binv = Mat3::from_columns(d.E1, d.E2, d.E3).inverse();

    // ghat(Ei,Ej) is constant (= delta_ij), so the residual reduces to
    // -ghat([X,Ei],Ej) - ghat(Ei,[X,Ej]) with brackets in coordinates.
    Vec3 bracket_in_frame[3];
    for (int i = 0; i < 3; ++i)
        bracket_in_frame[i] = Binv * fd_bracket(field, E(i), p.x, p.y, phi);

    double max_abs = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            const double r = -bracket_in_frame[i][j] - bracket_in_frame[j][i];
            max_abs = std::max(max_abs, std::abs(r));
        }
    return max_abs;
}

double lie_derivative_residual(const SurfaceChart& chart, LiftKilling field, Vec2 p,
                               double phi) {
    const CoordField f = field == LiftKilling::Vertical
                             ? CoordField([](double, double, double) { return Vec3{0, 0, 1}; })
                             : CoordField([](double, double, double) { return Vec3{1, 0, 0}; });
    return lie_derivative_residual(chart, f, p, phi);
}

SingularSetInfo singular_parallels(const SurfaceChart& chart, int n_samples) {
    if (chart.kind() != SurfaceChart::Kind::Revolution)
        throw ChartMismatch("singular_parallels needs a revolution chart");

    const DomainInterval& dom = chart.u2_domain();
    const double lo = std::isfinite(dom.lo) ? dom.lo : -10.0;
    const double hi = std::isfinite(dom.hi) ? dom.hi : 10.0;
    const double margin = dom.periodic ? 0.0 : 1e-9 * (hi - lo);
    const double a = lo + margin, b = hi - margin;
    const auto K = [&](double v) { return curvature(chart, {0.0, v}); };

    SingularSetInfo info;
    info.tol = 1e-13 * (1.0 + std::max(std::abs(a), std::abs(b)));
    const double guard = singular_guard(chart);

    std::vector<double> kv(n_samples + 1);
    int n_zero = 0;
    for (int i = 0; i <= n_samples; ++i) {
        kv[i] = K(a + (b - a) * i / n_samples);
        if (std::abs(kv[i]) < guard) ++n_zero;
    }
    if (n_zero > n_samples / 2) {
        info.identically_zero = true;
        return info;
    }

    const auto bisect = [&](double vl, double vr) {
        double fl = K(vl);
        for (int it = 0; it < 200 && vr - vl > info.tol; ++it) {
            const double vm = 0.5 * (vl + vr), fm = K(vm);
            if ((fl <= 0.0) == (fm <= 0.0)) {
                vl = vm;
                fl = fm;
            } else {
                vr = vm;
            }
        }
        return 0.5 * (vl + vr);
    };

    const double step = (b - a) / n_samples;
    const auto sgn = [&](double k) { return std::abs(k) < guard ? 0 : (k > 0.0 ? 1 : -1); };
    for (int i = 0; i < n_samples; ++i) {
        const double vl = a + step * i, vr = vl + step;
        if (sgn(kv[i]) * sgn(kv[i + 1]) < 0) {
            info.roots.push_back(bisect(vl, vr));
            info.grazing.push_back(false);
        } else if (i > 0 && sgn(kv[i]) == 0 && sgn(kv[i - 1]) * sgn(kv[i + 1]) < 0) {
            info.roots.push_back(vl);  // transversal crossing exactly on a sample
            info.grazing.push_back(false);
        } else if (i > 0 && std::abs(kv[i]) <= std::abs(kv[i - 1]) &&
                   std::abs(kv[i]) <= std::abs(kv[i + 1]) &&
                   std::abs(kv[i]) < 1e-4 * chart.curvature_scale() &&
                   sgn(kv[i - 1]) * sgn(kv[i + 1]) >= 0) {
            // candidate tangential touch: refine min |K| by golden section
            double xl = vl - step, xr = vr;
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = xr - gr * (xr - xl), x2 = xl + gr * (xr - xl);
            double f1 = std::abs(K(x1)), f2 = std::abs(K(x2));
            for (int it = 0; it < 120 && xr - xl > info.tol; ++it) {
                if (f1 < f2) {
                    xr = x2; x2 = x1; f2 = f1;
                    x1 = xr - gr * (xr - xl); f1 = std::abs(K(x1));
                } else {
                    xl = x1; x1 = x2; f1 = f2;
                    x2 = xl + gr * (xr - xl); f2 = std::abs(K(x2));
                }
            }
            const double xm = 0.5 * (xl + xr);
            if (std::abs(K(xm)) < 1e-10 * chart.curvature_scale()) {
                info.roots.push_back(xm);
                info.grazing.push_back(true);
            }
        }
    }
    return info;
}

void lift_structure_functions_fd(const SurfaceChart& chart, Vec2 p, double c_hat[3][3][3]) {
    const double K = curvature(chart, p);
    check_nonsingular(chart, p, K);
    const auto E = [&chart](int i) {
        return std::function<Vec3(double, double, double)>(
            [&chart, i](double u1, double u2, double) {
                return lift_field_component(chart, i, u1, u2);
            });
    };
    const LiftPointData d = lift_frame(chart, p, 0.0);
    const Mat3 Binv = Mat3::from_columns(d.E1, d.E2, d.E3).inverse();
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) c_hat[k][i][j] = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const Vec3 br = Binv * fd_bracket(E(i), E(j), p.x, p.y, 0.0);
            for (int k = 0; k < 3; ++k) {
                c_hat[k][i][j] = br[k];
                c_hat[k][j][i] = -br[k];
            }
        }
}

void lift_connection_koszul(const SurfaceChart& chart, Vec2 p, double gamma_hat[3][3][3]) {
    double c[3][3][3];
    lift_structure_functions(chart, p, c);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                gamma_hat[k][i][j] = 0.5 * (c[k][i][j] + c[j][k][i] + c[i][k][j]);
}

RhatFull lift_curvature_fd(const SurfaceChart& chart, Vec2 p) {
    const double K = curvature(chart, p);
    check_nonsingular(chart, p, K);
    const int layer = 1;  // the connection entries are once-differenced at worst

    const LiftPointData here = lift_frame(chart, p, 0.0);
    const Vec3 E[3] = {here.E1, here.E2, here.E3};

    // Frame derivatives of the connection entries; the entries are base
    // functions, so only the (u1, u2) part of each frame direction acts.
    double dgamma[3][3][3][3];  // [dir][k][i][j]
    for (int d = 0; d < 3; ++d) {
        const Vec2 dir{E[d].x, E[d].y};
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    if (dir.norm() < 1e-300) {
                        dgamma[d][k][i][j] = 0.0;
                        continue;
                    }
                    const auto entry = [&chart, k, i, j](Vec2 q) {
                        double g[3][3][3];
                        lift_connection(chart, q, g);
                        return g[k][i][j];
                    };
                    dgamma[d][k][i][j] =
                        directional_derivative(chart, p, dir, entry, layer);
                }
    }

    RhatFull out;
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    double r = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for (int s = 0; s < 3; ++s) {
                        r += here.gamma_hat[l][i][s] * here.gamma_hat[s][j][k];
                        r -= here.gamma_hat[l][j][s] * here.gamma_hat[s][i][k];
                        r -= here.c_hat[s][i][j] * here.gamma_hat[l][s][k];
                    }
                    out.r[l][i][j][k] = r;
                }
    return out;
}

TableVerification verify_tables(const SurfaceChart& chart, Vec2 p) {
    TableVerification v;

    double c[3][3][3], c_fd[3][3][3];
    lift_structure_functions(chart, p, c);
    lift_structure_functions_fd(chart, p, c_fd);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                v.max_delta_c = std::max(v.max_delta_c, std::abs(c[k][i][j] - c_fd[k][i][j]));

    double g[3][3][3], g_k[3][3][3];
    lift_connection(chart, p, g);
    lift_connection_koszul(chart, p, g_k);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                v.max_delta_gamma =
                    std::max(v.max_delta_gamma, std::abs(g[k][i][j] - g_k[k][i][j]));

    const RhatComponents r = lift_curvature(chart, p);
    const RhatFull r_fd = lift_curvature_fd(chart, p);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    v.max_delta_r = std::max(
                        v.max_delta_r, std::abs(r.full(i, j, k, l) - r_fd.r[l][i][j][k]));
    return v;
}

}  // namespace wagner
