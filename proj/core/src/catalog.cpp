#include "wagner/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wagner {

namespace {

constexpr double kPi = 3.14159265358979323846;

double param_or(const ParamMap& params, const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

Expr num(double v) { return expr_number(v); }
Expr var_u() { return expr_var(Var::U); }
Expr var_v() { return expr_var(Var::V); }
Expr mul(Expr a, Expr b) { return expr_bin(BinOp::Mul, std::move(a), std::move(b)); }
Expr add(Expr a, Expr b) { return expr_bin(BinOp::Add, std::move(a), std::move(b)); }
Expr div(Expr a, Expr b) { return expr_bin(BinOp::Div, std::move(a), std::move(b)); }
Expr call(Fn f, Expr a) { return expr_call(f, std::move(a)); }

SurfaceChart make_sphere(double k0) {
    if (!(k0 > 0.0)) throw InvalidParams("sphere needs K0 > 0");
    const double rt = std::sqrt(k0);
    RevolutionProfile profile;
    profile.A = div(call(Fn::Sin, mul(num(rt), var_v())), num(rt));
    profile.u2 = DomainInterval::open_interval(0.0, kPi / rt);
    return SurfaceChart::revolution(std::move(profile));
}

SurfaceChart make_flat() {
    RevolutionProfile profile;
    profile.A = num(1.0);
    profile.u2 = DomainInterval::open_interval(-8.0, 8.0);
    return SurfaceChart::revolution(std::move(profile));
}

SurfaceChart make_torus(double R, double r) {
    if (!(r > 0.0) || !(R > r)) throw InvalidParams("torus needs R > r > 0");
    RevolutionProfile profile;
    profile.A = add(num(R), mul(num(r), call(Fn::Cos, div(var_v(), num(r)))));
    profile.u2 = DomainInterval::periodic_interval(0.0, 2.0 * kPi * r);
    return SurfaceChart::revolution(std::move(profile));
}

SurfaceChart make_ellipsoid(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw InvalidParams("ellipsoid needs positive axes");
    const double eps = 1e-3;  // exclude the poles where the chart degenerates
    Expr x = mul(mul(num(a), call(Fn::Cos, var_u())), call(Fn::Cos, var_v()));
    Expr y = mul(mul(num(b), call(Fn::Sin, var_u())), call(Fn::Cos, var_v()));
    Expr z = mul(num(c), call(Fn::Sin, var_v()));
    return SurfaceChart::embedding(std::move(x), std::move(y), std::move(z),
                                   DomainInterval::periodic_interval(0.0, 2.0 * kPi),
                                   DomainInterval::open_interval(-kPi / 2 + eps, kPi / 2 - eps));
}

SurfaceChart make_custom_profile(const ParamMap& params, const std::string& expression) {
    if (expression.empty()) throw InvalidParams("custom-profile needs an expression in v");
    Expr a = parse(expression);
    if (depends_on(a, Var::U))
        throw InvalidParams("custom-profile expression must depend only on v");
    RevolutionProfile profile;
    profile.A = std::move(a);
    profile.u2 = DomainInterval::open_interval(param_or(params, "u2_lo", -5.0),
                                               param_or(params, "u2_hi", 5.0));
    profile.u1_period = param_or(params, "u1_period", 2.0 * kPi);
    return SurfaceChart::revolution(std::move(profile));
}

}  // namespace

SurfaceChart builtin(const std::string& name, const ParamMap& params,
                     const std::string& expression) {
    if (name == "sphere") return make_sphere(param_or(params, "K0", 1.0));
    if (name == "flat") return make_flat();
    if (name == "torus") return make_torus(param_or(params, "R", 2.0), param_or(params, "r", 1.0));
    if (name == "ellipsoid")
        return make_ellipsoid(param_or(params, "a", 1.0), param_or(params, "b", 1.5),
                              param_or(params, "c", 2.0));
    if (name == "custom-profile") return make_custom_profile(params, expression);
    throw UnknownSurface("unknown builtin surface '" + name + "'");
}

CatalogEntry catalog_entry(const std::string& name, const ParamMap& params) {
    CatalogEntry entry;
    entry.name = name;
    entry.chart = builtin(name, params);

    if (name == "sphere") {
        const double k0 = param_or(params, "K0", 1.0);
        entry.analytic_K = [k0](Vec2) { return k0; };
    } else if (name == "flat") {
        entry.analytic_K = [](Vec2) { return 0.0; };
    } else if (name == "torus") {
        const double R = param_or(params, "R", 2.0), r = param_or(params, "r", 1.0);
        entry.analytic_K = [R, r](Vec2 p) {
            const double th = p.y / r;
            return std::cos(th) / (r * (R + r * std::cos(th)));
        };
        entry.sigma_u2 = {kPi * r / 2.0, 3.0 * kPi * r / 2.0};
    } else if (name == "ellipsoid") {
        const double a = param_or(params, "a", 1.0), b = param_or(params, "b", 1.5),
                     c = param_or(params, "c", 2.0);
        entry.analytic_K = [a, b, c](Vec2 p) {
            const double x = a * std::cos(p.x) * std::cos(p.y);
            const double y = b * std::sin(p.x) * std::cos(p.y);
            const double z = c * std::sin(p.y);
            const double h2 = x * x / (a * a * a * a) + y * y / (b * b * b * b) +
                              z * z / (c * c * c * c);
            return 1.0 / (a * a * b * b * c * c * h2 * h2);
        };
    }
    return entry;
}

std::vector<std::string> catalog_names() {
    return {"sphere", "flat", "torus", "ellipsoid", "custom-profile"};
}

Vec2 min_curvature_point(const SurfaceChart& chart, int grid) {
    const DomainInterval& du = chart.u1_domain();
    const DomainInterval& dv = chart.u2_domain();
    const double ulo = std::isfinite(du.lo) ? du.lo : -10.0;
    const double uhi = std::isfinite(du.hi) ? du.hi : 10.0;
    const double vlo = std::isfinite(dv.lo) ? dv.lo : -10.0;
    const double vhi = std::isfinite(dv.hi) ? dv.hi : 10.0;

    Vec2 best{0.5 * (ulo + uhi), 0.5 * (vlo + vhi)};
    double best_k = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i)
        for (int j = 1; j < grid; ++j) {
            const Vec2 p{ulo + (uhi - ulo) * i / grid, vlo + (vhi - vlo) * j / grid};
            try {
                const double k = curvature(chart, p);
                if (k < best_k) {
                    best_k = k;
                    best = p;
                }
            } catch (const NumericalError&) {
            }
        }

    // local pattern search refinement
    double step = std::max(uhi - ulo, vhi - vlo) / grid;
    while (step > 1e-7) {
        bool improved = false;
        const Vec2 dirs[4] = {{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}};
        for (const Vec2& d : dirs) {
            const Vec2 cand{best.x + d.x, best.y + d.y};
            if (!chart.in_domain(cand)) continue;
            try {
                const double k = curvature(chart, cand);
                if (k < best_k) {
                    best_k = k;
                    best = cand;
                    improved = true;
                }
            } catch (const NumericalError&) {
            }
        }
        if (!improved) step *= 0.5;
    }
    return chart.wrap(best);
}

}  // namespace wagner
