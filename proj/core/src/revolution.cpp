#include "wagner/revolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wagner {

namespace {

const RevolutionProfile& require_profile(const SurfaceChart& chart, const char* op) {
    if (chart.kind() != SurfaceChart::Kind::Revolution)
        throw ChartMismatch(std::string(op) + " needs a revolution chart");
    return *chart.profile();
}

double drift_of(const std::vector<double>& series) {
    if (series.empty()) return 0.0;
    const double v0 = series.front();
    double d = 0.0;
    for (double v : series) d = std::max(d, std::abs(v - v0));
    return d / std::max(std::abs(v0), 1e-3);
}

struct Radicand {
    const SurfaceChart& chart;
    double C, C2, C3sq;

    double operator()(double v) const {
        const Jet3 a = chart.profile()->jet(v);
        const double K = -a.d2 / a.value;
        const double m = C2 + C * a.d1;
        return a.value * a.value * (C3sq - C * C * K * K) - m * m;
    }
};

}  // namespace

FirstIntegrals first_integrals(const Trajectory& traj, const SurfaceChart& chart, double C) {
    const RevolutionProfile& profile = require_profile(chart, "first_integrals");

    FirstIntegrals fi;
    fi.has_c1 = traj.kind == Trajectory::Kind::Lifted;
    fi.c1.reserve(traj.samples.size());
    fi.c2.reserve(traj.samples.size());
    fi.c3sq.reserve(traj.samples.size());

    // Lifted trajectories conserve C1 = Q3/K; their Clairaut-type constant
    // uses C1 in place of the projected equation's C.
    double c_eff = C;
    if (fi.has_c1) {
        const TrajectorySample& s0 = traj.samples.front();
        const double k0 = curvature(chart, {s0.y[0], s0.y[1]});
        c_eff = s0.y[5] / k0;
    }

    for (const TrajectorySample& s : traj.samples) {
        const Jet3 a = profile.jet(s.y[1]);
        const double K = -a.d2 / a.value;
        if (fi.has_c1) fi.c1.push_back(s.y[5] / K);
        fi.c2.push_back(a.value * s.y[3] - c_eff * a.d1);
        fi.c3sq.push_back(s.y[3] * s.y[3] + s.y[4] * s.y[4] + c_eff * c_eff * K * K);
    }

    if (fi.has_c1) {
        fi.c1_0 = fi.c1.front();
        fi.c1_drift = drift_of(fi.c1);
    }
    fi.c2_0 = fi.c2.front();
    fi.c3sq_0 = fi.c3sq.front();
    fi.c2_drift = drift_of(fi.c2);
    fi.c3sq_drift = drift_of(fi.c3sq);
    return fi;
}

ForbiddenRegion forbidden_region(const SurfaceChart& chart, const ProjectedState& init,
                                 double C) {
    require_profile(chart, "forbidden_region");
    if (C == 0.0) throw InvalidParams("forbidden_region requires C != 0");

    const double k0 = curvature(chart, {init.u1, init.u2});
    const double c3sq = init.q1 * init.q1 + init.q2 * init.q2 + C * C * k0 * k0;

    ForbiddenRegion region;
    region.K_max = std::sqrt(c3sq) / std::abs(C);

    const DomainInterval& dom = chart.u2_domain();
    double lo = std::isfinite(dom.lo) ? dom.lo : -10.0;
    double hi = std::isfinite(dom.hi) ? dom.hi : 10.0;
    if (!dom.periodic) {
        const double margin = 1e-9 * (hi - lo);  // open interval: step inside
        lo += margin;
        hi -= margin;
    }
    const int n = 4096;
    const auto inside = [&](double v) {
        return std::abs(curvature(chart, {0.0, v})) <= region.K_max;
    };

    const auto edge = [&](double va, double vb) {
        // bisect the boundary |K| = K_max between an inside and outside point
        bool ia = inside(va);
        for (int it = 0; it < 80; ++it) {
            const double vm = 0.5 * (va + vb);
            if (inside(vm) == ia)
                va = vm;
            else
                vb = vm;
        }
        return 0.5 * (va + vb);
    };

    bool open = false;
    double band_lo = lo;
    double prev = lo;
    bool prev_in = inside(lo);
    if (prev_in) {
        open = true;
        band_lo = lo;
    }
    for (int i = 1; i <= n; ++i) {
        const double v = lo + (hi - lo) * i / n;
        const bool in = inside(v);
        if (in && !prev_in) {
            band_lo = edge(v, prev);
            open = true;
        } else if (!in && prev_in && open) {
            region.bands.push_back({band_lo, edge(prev, v)});
            open = false;
        }
        prev = v;
        prev_in = in;
    }
    if (open) region.bands.push_back({band_lo, hi});
    return region;
}

RegionBand transversal_span(const SurfaceChart& chart, double C, double C2, double C3sq,
                            double u2_init) {
    require_profile(chart, "transversal_span");
    const Radicand rad{chart, C, C2, C3sq};
    if (!(rad(u2_init) > 0.0))
        throw NonTransversal("radicand non-positive at u2 = " + std::to_string(u2_init));

    const DomainInterval& dom = chart.u2_domain();
    const double lo = std::isfinite(dom.lo) ? dom.lo : u2_init - 20.0;
    const double hi = std::isfinite(dom.hi) ? dom.hi : u2_init + 20.0;
    const double step = (hi - lo) / 8192.0;

    const auto bisect_zero = [&](double v_pos, double v_neg) {
        for (int it = 0; it < 80; ++it) {
            const double vm = 0.5 * (v_pos + v_neg);
            if (rad(vm) > 0.0)
                v_pos = vm;
            else
                v_neg = vm;
        }
        return 0.5 * (v_pos + v_neg);
    };

    RegionBand band{lo, hi};
    for (double v = u2_init; v < hi; v += step) {
        const double w = std::min(v + step, hi);
        if (!(rad(w) > 0.0)) {
            band.hi = bisect_zero(v, w);
            break;
        }
    }
    for (double v = u2_init; v > lo; v -= step) {
        const double w = std::max(v - step, lo);
        if (!(rad(w) > 0.0)) {
            band.lo = bisect_zero(v, w);
            break;
        }
    }
    return band;
}

std::vector<GraphSample> graph_quadrature(const SurfaceChart& chart, double C, double C2,
                                          double C3sq, double u2_lo, double u2_hi,
                                          double u2_init, double u1_init, int n_samples) {
    require_profile(chart, "graph_quadrature");
    if (!(u2_lo <= u2_init && u2_init <= u2_hi))
        throw InvalidParams("u2_init must lie inside the requested span");

    const Radicand rad{chart, C, C2, C3sq};
    if (!(rad(u2_init) > 0.0))
        throw NonTransversal("radicand non-positive at u2 = " + std::to_string(u2_init));

    const auto integrand = [&](double v) {
        const double r = rad(v);
        if (!(r > 0.0))
            throw TurningPoint("trajectory tangent to a parallel at u2 = " + std::to_string(v),
                               v);
        const Jet3 a = chart.profile()->jet(v);
        return (C2 + C * a.d1) / (a.value * std::sqrt(r));
    };

    // adaptive Simpson between consecutive requested samples
    const auto simpson = [&](double a, double b) {
        struct Frame {
            double lo, hi, flo, fmid, fhi, whole;
        };
        const auto quick = [&](double l, double h, double fl, double fm, double fh) {
            return (h - l) / 6.0 * (fl + 4.0 * fm + fh);
        };
        double total = 0.0;
        std::vector<Frame> stack;
        std::vector<double> tols;
        const double f_a = integrand(a), f_b = integrand(b), f_m = integrand(0.5 * (a + b));
        stack.push_back({a, b, f_a, f_m, f_b, quick(a, b, f_a, f_m, f_b)});
        tols.push_back(1e-12 * (1.0 + std::abs(b - a)));
        int depth_budget = 1 << 22;
        while (!stack.empty()) {
            if (--depth_budget < 0)
                throw InterpolationError("graph quadrature failed to converge");
            const Frame fr = stack.back();
            stack.pop_back();
            const double tol = tols.back();
            tols.pop_back();
            const double mid = 0.5 * (fr.lo + fr.hi);
            const double f_lm = integrand(0.5 * (fr.lo + mid));
            const double f_mh = integrand(0.5 * (mid + fr.hi));
            const double left = quick(fr.lo, mid, fr.flo, f_lm, fr.fmid);
            const double right = quick(mid, fr.hi, fr.fmid, f_mh, fr.fhi);
            const double delta = left + right - fr.whole;
            if (std::abs(delta) < 15.0 * tol || fr.hi - fr.lo < 1e-14) {
                total += left + right + delta / 15.0;
            } else {
                stack.push_back({fr.lo, mid, fr.flo, f_lm, fr.fmid, left});
                tols.push_back(0.5 * tol);
                stack.push_back({mid, fr.hi, fr.fmid, f_mh, fr.fhi, right});
                tols.push_back(0.5 * tol);
            }
        }
        return total;
    };

    std::vector<GraphSample> graph;
    graph.reserve(n_samples + 1);
    std::vector<double> grid(n_samples + 1);
    for (int i = 0; i <= n_samples; ++i)
        grid[i] = u2_lo + (u2_hi - u2_lo) * i / n_samples;

    // integrate outward from u2_init in both directions
    std::vector<GraphSample> below, above;
    double u1 = u1_init, v_prev = u2_init;
    for (int i = 0; i <= n_samples; ++i) {
        if (grid[i] < u2_init) continue;
        u1 += simpson(v_prev, grid[i]);
        above.push_back({grid[i], u1});
        v_prev = grid[i];
    }
    u1 = u1_init;
    v_prev = u2_init;
    for (int i = n_samples; i >= 0; --i) {
        if (grid[i] >= u2_init) continue;
        u1 -= simpson(grid[i], v_prev);
        below.push_back({grid[i], u1});
        v_prev = grid[i];
    }
    std::reverse(below.begin(), below.end());
    graph.insert(graph.end(), below.begin(), below.end());
    graph.insert(graph.end(), above.begin(), above.end());
    return graph;
}

ActionResult lagrangian_action(const SurfaceChart& chart, const Trajectory& traj, double C,
                               int n_resample) {
    const RevolutionProfile& profile = require_profile(chart, "lagrangian_action");
    if (traj.samples.size() < 5)
        throw InterpolationError("trajectory too short for the action functional");

    // uniform (t, u, v) samples of the curve
    std::vector<double> ts, us, vs;
    if (n_resample > 4) {
        const double t0 = traj.t_begin(), t1 = traj.t_end();
        for (int i = 0; i <= n_resample; ++i) {
            const double t = t0 + (t1 - t0) * i / n_resample;
            const auto y = traj.state_at(t);
            ts.push_back(t);
            us.push_back(y[0]);
            vs.push_back(y[1]);
        }
    } else {
        for (const TrajectorySample& s : traj.samples) {
            ts.push_back(s.t);
            us.push_back(s.y[0]);
            vs.push_back(s.y[1]);
        }
    }
    const std::size_t n = ts.size();
    const double h = (ts.back() - ts.front()) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(ts[i] - ts[i - 1] - h) > 1e-6 * h)
            throw InterpolationError(
                "discrete Euler-Lagrange residual needs uniform samples; "
                "pass n_resample or integrate with a fixed step");

    // L(x, x') = (A^2 u'^2 + v'^2)/2 - C A' u' - C^2 K^2 / 2 with
    //   dL/du' = A^2 u' - C A',  dL/dv' = v',
    //   dL/du = 0,               dL/dv = A A' u'^2 - C A'' u' - C^2 K K'.
    const auto at = [&](std::size_t i, double& pu, double& pv, double& lu, double& lv,
                        double& lagr) {
        const double du = (us[i + 1] - us[i - 1]) / (2.0 * h);
        const double dv = (vs[i + 1] - vs[i - 1]) / (2.0 * h);
        const Jet3 a = profile.jet(vs[i]);
        const double K = -a.d2 / a.value;
        const double Kp = (-a.d3 * a.value + a.d2 * a.d1) / (a.value * a.value);
        pu = a.value * a.value * du - C * a.d1;
        pv = dv;
        lu = 0.0;
        lv = a.value * a.d1 * du * du - C * a.d2 * du - C * C * K * Kp;
        lagr = 0.5 * (a.value * a.value * du * du + dv * dv) - C * a.d1 * du -
               0.5 * C * C * K * K;
    };

    ActionResult out;
    std::vector<double> pu(n, 0.0), pv(n, 0.0), lu(n, 0.0), lv(n, 0.0), lagr(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) at(i, pu[i], pv[i], lu[i], lv[i], lagr[i]);

    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double ru = (pu[i + 1] - pu[i - 1]) / (2.0 * h) - lu[i];
        const double rv = (pv[i + 1] - pv[i - 1]) / (2.0 * h) - lv[i];
        out.max_el_residual = std::max(out.max_el_residual, std::max(std::abs(ru), std::abs(rv)));
    }

    // trapezoid over the interior Lagrangian samples
    for (std::size_t i = 1; i + 2 < n; ++i)
        out.action += 0.5 * h * (lagr[i] + lagr[i + 1]);
    return out;
}

}  // namespace wagner
