#include "wagner/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wagner {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

using State = std::array<double, 6>;

State hermite(const TrajectorySample& s0, const TrajectorySample& s1, double t) {
    const double h = s1.t - s0.t;
    const double x = (t - s0.t) / h;
    const double x2 = x * x, x3 = x2 * x;
    const double h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
    const double h10 = x3 - 2.0 * x2 + x;
    const double h01 = -2.0 * x3 + 3.0 * x2;
    const double h11 = x3 - x2;
    State out;
    for (int i = 0; i < 6; ++i)
        out[i] = h00 * s0.y[i] + h10 * h * s0.dy[i] + h01 * s1.y[i] + h11 * h * s1.dy[i];
    return out;
}

struct ProjectedRhs {
    const SurfaceChart& chart;
    double C;

    void operator()(const State& y, State& dy) const {
        const Vec2 p{y[0], y[1]};
        const FrameCore fc = frame_core(chart, p);
        const double q1 = y[3], q2 = y[4];
        dy[0] = q1 * fc.e1.x + q2 * fc.e2.x;
        dy[1] = q1 * fc.e1.y + q2 * fc.e2.y;
        dy[2] = 0.0;
        dy[3] = -(fc.c112 * q1 * q2 + fc.c212 * q2 * q2);
        dy[4] = fc.c112 * q1 * q1 + fc.c212 * q1 * q2;
        dy[5] = 0.0;
        if (C != 0.0) {
            const double K = curvature(chart, p);
            const Vec2 gk = grad_curvature(chart, p);
            dy[3] += -C * K * q2 - C * C * K * gk.x;
            dy[4] += C * K * q1 - C * C * K * gk.y;
        }
    }
};

struct LiftedRhs {
    const SurfaceChart& chart;

    void operator()(const State& y, State& dy) const {
        const Vec2 p{y[0], y[1]};
        const FrameCore fc = frame_core(chart, p);
        const double K = curvature(chart, p);
        if (K == 0.0) throw SingularPoint("lifted system evaluated at K = 0");
        const Vec2 gk = grad_curvature(chart, p);
        const double P = gk.x / K, R = gk.y / K;
        const double q1 = y[3], q2 = y[4], q3 = y[5];
        dy[0] = q1 * fc.e1.x + q2 * fc.e2.x;
        dy[1] = q1 * fc.e1.y + q2 * fc.e2.y;
        dy[2] = q1 * fc.c112 + q2 * fc.c212 + q3 * K;
        dy[3] = -(fc.c112 * q1 * q2 + fc.c212 * q2 * q2 + q2 * q3 + P * q3 * q3);
        dy[4] = fc.c112 * q1 * q1 + fc.c212 * q1 * q2 + q1 * q3 - R * q3 * q3;
        dy[5] = (P * q1 + R * q2) * q3;
    }
};

bool is_revolution(const SurfaceChart& chart) {
    return chart.kind() == SurfaceChart::Kind::Revolution;
}

void fill_diagnostics(const SurfaceChart& chart, Trajectory::Kind kind, double C,
                      TrajectorySample& s) {
    const Vec2 p{s.y[0], s.y[1]};
    s.K = curvature(chart, p);
    s.c1 = kNan;
    s.c2 = kNan;
    s.c3sq = kNan;
    if (kind == Trajectory::Kind::Lifted && s.K != 0.0) s.c1 = s.y[5] / s.K;
    if (is_revolution(chart)) {
        const Jet3 a = chart.profile()->jet(s.y[1]);
        s.c2 = a.value * s.y[3] - C * a.d1;
        s.c3sq = s.y[3] * s.y[3] + s.y[4] * s.y[4] + C * C * s.K * s.K;
    }
}

struct StepResult {
    State y;
    double err = 0.0;
};

template <class Rhs>
StepResult rkf45_step(const Rhs& rhs, const State& y, const State& k1, double h, double atol,
                      double rtol) {
    // Fehlberg 4(5) coefficients; advance with the 5th-order solution.
    State k2, k3, k4, k5, k6, tmp;

    const auto axpy = [&](const State& base, std::initializer_list<std::pair<double, const State*>> terms) {
        tmp = base;
        for (const auto& [c, k] : terms)
            for (int i = 0; i < 6; ++i) tmp[i] += h * c * (*k)[i];
        return tmp;
    };

    rhs(axpy(y, {{1.0 / 4.0, &k1}}), k2);
    rhs(axpy(y, {{3.0 / 32.0, &k1}, {9.0 / 32.0, &k2}}), k3);
    rhs(axpy(y, {{1932.0 / 2197.0, &k1}, {-7200.0 / 2197.0, &k2}, {7296.0 / 2197.0, &k3}}), k4);
    rhs(axpy(y, {{439.0 / 216.0, &k1}, {-8.0, &k2}, {3680.0 / 513.0, &k3},
                 {-845.0 / 4104.0, &k4}}),
        k5);
    rhs(axpy(y, {{-8.0 / 27.0, &k1}, {2.0, &k2}, {-3544.0 / 2565.0, &k3},
                 {1859.0 / 4104.0, &k4}, {-11.0 / 40.0, &k5}}),
        k6);

    StepResult r;
    double err2 = 0.0;
    for (int i = 0; i < 6; ++i) {
        const double y5 = y[i] + h * (16.0 / 135.0 * k1[i] + 6656.0 / 12825.0 * k3[i] +
                                      28561.0 / 56430.0 * k4[i] - 9.0 / 50.0 * k5[i] +
                                      2.0 / 55.0 * k6[i]);
        const double y4 = y[i] + h * (25.0 / 216.0 * k1[i] + 1408.0 / 2565.0 * k3[i] +
                                      2197.0 / 4104.0 * k4[i] - 1.0 / 5.0 * k5[i]);
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5));
        const double e = (y5 - y4) / sc;
        err2 += e * e;
        r.y[i] = y5;
    }
    r.err = std::sqrt(err2 / 6.0);
    return r;
}

template <class Rhs>
State rk4_step(const Rhs& rhs, const State& y, const State& k1, double h) {
    State k2, k3, k4, tmp;
    for (int i = 0; i < 6; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(tmp, k2);
    for (int i = 0; i < 6; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(tmp, k3);
    for (int i = 0; i < 6; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(tmp, k4);
    State out;
    for (int i = 0; i < 6; ++i)
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

void check_domain(const SurfaceChart& chart, const State& y) {
    if (!chart.in_domain({y[0], y[1]}))
        throw LeftDomain("trajectory left the chart domain at (" + std::to_string(y[0]) + ", " +
                         std::to_string(y[1]) + ")");
}

bool near_boundary(const SurfaceChart& chart, const State& y) {
    const auto close = [](const DomainInterval& dom, double x) {
        if (dom.periodic) return false;
        const double tol = 1e-3 * (1.0 + std::abs(x));
        return (std::isfinite(dom.lo) && x - dom.lo < tol) ||
               (std::isfinite(dom.hi) && dom.hi - x < tol);
    };
    return close(chart.u1_domain(), y[0]) || close(chart.u2_domain(), y[1]);
}

void validate(const IntegratorConfig& cfg) {
    if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol >= 0.0))
        throw InvalidParams("integrator tolerances must be positive");
    if (!(cfg.h_min <= cfg.h_init && cfg.h_init <= cfg.h_max) || !(cfg.h_min > 0.0))
        throw InvalidParams("step bounds must satisfy 0 < h_min <= h_init <= h_max");
    if (!(cfg.t1 > cfg.t0)) throw InvalidParams("t_span must be increasing");
}

template <class Rhs>
Trajectory integrate_core(const SurfaceChart& chart, const Rhs& rhs, State y0,
                          const IntegratorConfig& cfg, Trajectory::Kind kind, double C) {
    validate(cfg);
    Trajectory traj;
    traj.kind = kind;
    traj.C = C;
    traj.stats.min_step = std::numeric_limits<double>::infinity();

    const bool lifted = kind == Trajectory::Kind::Lifted;
    const double guard = singular_guard(chart);

    double t = cfg.t0;
    State y = y0, dy;
    rhs(y, dy);

    TrajectorySample s0;
    s0.t = t;
    s0.y = y;
    s0.dy = dy;
    fill_diagnostics(chart, kind, C, s0);
    traj.samples.push_back(s0);
    double k_prev = s0.K;

    double h = std::min(cfg.h_init, cfg.h_max);
    double err_prev = 1.0;

    while (t < cfg.t1 - 1e-14 * (1.0 + std::abs(cfg.t1))) {
        if (traj.stats.n_steps + traj.stats.n_rejected > cfg.max_steps)
            throw MaxStepsExceeded("integration exceeded max_steps = " +
                                   std::to_string(cfg.max_steps));

        const bool clipped = t + h >= cfg.t1;
        const double h_eff = clipped ? cfg.t1 - t : h;

        State y_new;
        bool accepted = false;
        if (cfg.method == OdeMethod::Rk4) {
            y_new = rk4_step(rhs, y, dy, h_eff);
            accepted = true;
        } else {
            StepResult r;
            bool failed = false;
            try {
                r = rkf45_step(rhs, y, dy, h_eff, cfg.abs_tol, cfg.rel_tol);
            } catch (const NumericalError&) {
                failed = true;  // stage left the metric's domain; retry smaller
            }
            const double err = failed || !std::isfinite(r.err)
                                   ? std::numeric_limits<double>::infinity()
                                   : r.err;
            if (err <= 1.0) {
                y_new = r.y;
                accepted = true;
                const double fac = err == 0.0 ? 5.0
                                              : 0.9 * std::pow(err, -0.14) *
                                                    std::pow(err_prev, 0.08);
                h = h_eff * std::clamp(fac, 0.2, 5.0);
                err_prev = std::max(err, 1e-4);
            } else {
                ++traj.stats.n_rejected;
                const double fac =
                    std::isfinite(err) ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.25;
                h = h_eff * fac;
            }
            h = std::min(h, cfg.h_max);
            if (!accepted) {
                if (h < cfg.h_min) {
                    if (lifted && std::abs(k_prev) < 1e-3 * chart.curvature_scale()) {
                        traj.termination = Termination::SingularApproach;
                        traj.crossings.push_back(
                            {t, {y[0], y[1]}, std::abs(y[5] * k_prev), false});
                        return traj;
                    }
                    if (near_boundary(chart, y))
                        throw LeftDomain("step size collapsed at the chart boundary near (" +
                                         std::to_string(y[0]) + ", " +
                                         std::to_string(y[1]) + ")");
                    throw StepUnderflow("step size fell below h_min = " +
                                        std::to_string(cfg.h_min));
                }
                continue;
            }
        }

        t += h_eff;
        y = y_new;
        check_domain(chart, y);

        TrajectorySample s;
        s.t = t;
        s.y = y;
        try {
            rhs(y, dy);
            s.dy = dy;
            fill_diagnostics(chart, kind, C, s);
        } catch (const NumericalError&) {
            if (lifted) {
                // landed on (or numerically at) the singular set
                traj.termination = Termination::SingularApproach;
                traj.crossings.push_back({t, {y[0], y[1]}, 0.0, false});
                return traj;
            }
            throw;
        }

        if (lifted) {
            const bool sign_flip = (s.K > 0.0) != (k_prev > 0.0);
            if (sign_flip || std::abs(s.K) < guard) {
                traj.termination = Termination::SingularApproach;
                traj.crossings.push_back(
                    {t, {y[0], y[1]}, std::abs(s.y[5] * s.K), false});
                return traj;
            }
        }
        k_prev = s.K;
        traj.samples.push_back(s);
        ++traj.stats.n_steps;
        if (!clipped) traj.stats.min_step = std::min(traj.stats.min_step, h_eff);
    }
    return traj;
}

/// Adaptive Simpson for a pair of integrands evaluated together.
struct PairIntegral {
    double a = 0.0, b = 0.0;
};

template <class F>
PairIntegral simpson_pair(const F& f, double lo, double hi, double tol, int depth,
                          const PairIntegral& flo, const PairIntegral& fmid,
                          const PairIntegral& fhi, const PairIntegral& whole) {
    const double mid = 0.5 * (lo + hi);
    const PairIntegral f_lm = f(0.5 * (lo + mid));
    const PairIntegral f_mh = f(0.5 * (mid + hi));
    const double h6 = (hi - lo) / 12.0;
    const PairIntegral left{h6 * (flo.a + 4.0 * f_lm.a + fmid.a),
                            h6 * (flo.b + 4.0 * f_lm.b + fmid.b)};
    const PairIntegral right{h6 * (fmid.a + 4.0 * f_mh.a + fhi.a),
                             h6 * (fmid.b + 4.0 * f_mh.b + fhi.b)};
    const double da = left.a + right.a - whole.a;
    const double db = left.b + right.b - whole.b;
    if (std::abs(da) < 15.0 * tol && std::abs(db) < 15.0 * tol)
        return {left.a + right.a + da / 15.0, left.b + right.b + db / 15.0};
    if (depth <= 0)
        throw InterpolationError("quadrature on the stored trajectory failed to converge; "
                                 "samples too sparse");
    const PairIntegral l =
        simpson_pair(f, lo, mid, 0.5 * tol, depth - 1, flo, f_lm, fmid, left);
    const PairIntegral r =
        simpson_pair(f, mid, hi, 0.5 * tol, depth - 1, fmid, f_mh, fhi, right);
    return {l.a + r.a, l.b + r.b};
}

template <class F>
PairIntegral integrate_pair(const F& f, double lo, double hi, double tol) {
    const PairIntegral flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
    const double h6 = (hi - lo) / 6.0;
    const PairIntegral whole{h6 * (flo.a + 4.0 * fmid.a + fhi.a),
                             h6 * (flo.b + 4.0 * fmid.b + fhi.b)};
    return simpson_pair(f, lo, hi, tol, 24, flo, fmid, fhi, whole);
}

}  // namespace

std::array<double, 6> Trajectory::state_at(double t) const {
    if (samples.empty()) throw InterpolationError("empty trajectory");
    if (t <= samples.front().t) return samples.front().y;
    if (t >= samples.back().t) return samples.back().y;
    const auto it = std::upper_bound(samples.begin(), samples.end(), t,
                                     [](double tt, const TrajectorySample& s) { return tt < s.t; });
    const TrajectorySample& s1 = *it;
    const TrajectorySample& s0 = *(it - 1);
    return hermite(s0, s1, t);
}

Trajectory integrate_projected(const SurfaceChart& chart, const ProjectedState& init, double C,
                               const IntegratorConfig& cfg) {
    if (!chart.in_domain({init.u1, init.u2}))
        throw LeftDomain("initial point outside the chart domain");
    State y0{init.u1, init.u2, 0.0, init.q1, init.q2, 0.0};
    IntegratorConfig c = cfg;
    c.t0 = init.t;
    Trajectory traj =
        integrate_core(chart, ProjectedRhs{chart, C}, y0, c, Trajectory::Kind::Projected, C);
    if (cfg.detect_events) traj.crossings = detect_sigma_crossings(traj, chart);
    return traj;
}

Trajectory integrate_lifted(const SurfaceChart& chart, const LiftedState& init,
                            const IntegratorConfig& cfg) {
    if (!chart.in_domain({init.u1, init.u2}))
        throw LeftDomain("initial point outside the chart domain");
    const double k0 = curvature(chart, {init.u1, init.u2});
    if (std::abs(k0) < singular_guard(chart))
        throw SingularPoint("lifted initial point lies on the singular set");
    State y0{init.u1, init.u2, init.phi, init.q1, init.q2, init.q3};
    IntegratorConfig c = cfg;
    c.t0 = init.t;
    return integrate_core(chart, LiftedRhs{chart}, y0, c, Trajectory::Kind::Lifted, init.q3 / k0);
}

Trajectory lift_solution(const SurfaceChart& chart, const Trajectory& gamma, double phi0,
                         double C) {
    if (gamma.kind != Trajectory::Kind::Projected)
        throw ChartMismatch("lift_solution expects a projected trajectory");
    if (gamma.samples.size() < 2)
        throw InterpolationError("projected trajectory has too few samples to lift");

    Trajectory out;
    out.kind = Trajectory::Kind::Lifted;
    out.C = C;
    out.termination = gamma.termination;
    out.stats = gamma.stats;
    out.crossings = gamma.crossings;
    out.samples.reserve(gamma.samples.size());

    double phi = phi0;
    for (std::size_t i = 0; i < gamma.samples.size(); ++i) {
        const TrajectorySample& gs = gamma.samples[i];
        if (i > 0) {
            const TrajectorySample& prev = gamma.samples[i - 1];
            // d(phi_h)/dt = Q1 c112 + Q2 c212 along gamma; alpha' = C K^2.
            const auto f = [&](double s) {
                const State ys = hermite(prev, gs, s);
                const FrameCore fc = frame_core(chart, {ys[0], ys[1]});
                const double K = curvature(chart, {ys[0], ys[1]});
                return PairIntegral{ys[3] * fc.c112 + ys[4] * fc.c212, C * K * K};
            };
            const double tol = 1e-13 * std::max(1.0, gs.t - prev.t);
            const PairIntegral inc = integrate_pair(f, prev.t, gs.t, tol);
            phi += inc.a + inc.b;
        }

        TrajectorySample s;
        s.t = gs.t;
        const Vec2 p{gs.y[0], gs.y[1]};
        const FrameCore fc = frame_core(chart, p);
        const double K = curvature(chart, p);
        const Vec2 gk = grad_curvature(chart, p);
        s.y = {gs.y[0], gs.y[1], phi, gs.y[3], gs.y[4], C * K};
        s.dy = gs.dy;
        s.dy[2] = gs.y[3] * fc.c112 + gs.y[4] * fc.c212 + C * K * K;
        s.dy[5] = C * (gk.x * gs.y[3] + gk.y * gs.y[4]);
        fill_diagnostics(chart, Trajectory::Kind::Lifted, C, s);
        out.samples.push_back(s);
    }
    return out;
}

std::vector<SigmaCrossing> detect_sigma_crossings(const Trajectory& traj,
                                                  const SurfaceChart& chart) {
    std::vector<SigmaCrossing> events;
    if (traj.samples.size() < 3) return events;

    const auto k_at = [&](double t) {
        const State y = traj.state_at(t);
        return curvature(chart, {y[0], y[1]});
    };
    const double k_scale = chart.curvature_scale();

    for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
        const TrajectorySample& s0 = traj.samples[i];
        const TrajectorySample& s1 = traj.samples[i + 1];
        if ((s0.K > 0.0) != (s1.K > 0.0)) {
            double lo = s0.t, hi = s1.t;
            double f_lo = s0.K;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                const double fm = k_at(mid);
                if ((f_lo > 0.0) == (fm > 0.0)) {
                    lo = mid;
                    f_lo = fm;
                } else {
                    hi = mid;
                }
            }
            const double tc = 0.5 * (lo + hi);
            const State y = traj.state_at(tc);
            const double kc = k_at(tc);
            events.push_back({tc, {y[0], y[1]}, std::abs(traj.C * kc * kc), false});
        } else if (i > 0) {
            const TrajectorySample& sm = traj.samples[i];
            const TrajectorySample& sl = traj.samples[i - 1];
            const bool same_sign = (sl.K > 0.0) == (sm.K > 0.0) && (sm.K > 0.0) == (s1.K > 0.0);
            if (same_sign && std::abs(sm.K) <= std::abs(sl.K) &&
                std::abs(sm.K) <= std::abs(s1.K) && std::abs(sm.K) < 0.1 * k_scale) {
                // candidate grazing touch: minimize |K| over the bracket
                double xl = sl.t, xr = s1.t;
                const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
                double x1 = xr - gr * (xr - xl), x2 = xl + gr * (xr - xl);
                double f1 = std::abs(k_at(x1)), f2 = std::abs(k_at(x2));
                for (int it = 0; it < 100 && xr - xl > 1e-11; ++it) {
                    if (f1 < f2) {
                        xr = x2; x2 = x1; f2 = f1;
                        x1 = xr - gr * (xr - xl); f1 = std::abs(k_at(x1));
                    } else {
                        xl = x1; x1 = x2; f1 = f2;
                        x2 = xl + gr * (xr - xl); f2 = std::abs(k_at(x2));
                    }
                }
                const double tc = 0.5 * (xl + xr);
                const double kc = k_at(tc);
                if (std::abs(kc) < 1e-7 * k_scale) {
                    const State y = traj.state_at(tc);
                    events.push_back({tc, {y[0], y[1]}, std::abs(traj.C * kc * kc), true});
                }
            }
        }
    }
    return events;
}

}  // namespace wagner
