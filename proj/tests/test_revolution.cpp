#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wagner/catalog.hpp"
#include "wagner/ode.hpp"
#include "wagner/revolution.hpp"

using namespace wagner;

namespace {

constexpr double kPi = 3.14159265358979323846;

IntegratorConfig tight(double t1) {
    IntegratorConfig cfg;
    cfg.t1 = t1;
    return cfg;
}

Trajectory curve_trajectory(const SurfaceChart& chart, double u_rate, double v0, double t1,
                            int n) {
    // a parallel traversed at constant coordinate rate, packaged as a
    // trajectory (not a solution unless A'(v0) = 0)
    Trajectory traj;
    traj.kind = Trajectory::Kind::Projected;
    traj.C = 0.0;
    const Jet3 a = chart.profile()->jet(v0);
    for (int i = 0; i <= n; ++i) {
        TrajectorySample s;
        s.t = t1 * i / n;
        s.y = {u_rate * s.t, v0, 0.0, a.value * u_rate, 0.0, 0.0};
        s.dy = {u_rate, 0.0, 0.0, 0.0, 0.0, 0.0};
        s.K = -a.d2 / a.value;
        traj.samples.push_back(s);
    }
    return traj;
}

}  // namespace

TEST_CASE("first integrals on the torus") {
    const SurfaceChart torus = builtin("torus");

    SUBCASE("C = 0 reduces to the classical Clairaut quantity") {
        const double alpha = 0.62, v0 = 0.8;
        const Trajectory traj = integrate_projected(
            torus, {0.0, v0, std::cos(alpha), std::sin(alpha), 0.0}, 0.0, tight(25.0));
        const FirstIntegrals fi = first_integrals(traj, torus, 0.0);
        CHECK_FALSE(fi.has_c1);
        CHECK(fi.c2_0 == doctest::Approx((2.0 + std::cos(v0)) * std::cos(alpha)));
        CHECK(fi.c2_drift < 1e-8);

        // against an independent coordinate-form geodesic integrator
        const auto profile = [](double v) {
            return std::make_pair(2.0 + std::cos(v), -std::sin(v));
        };
        oracles::CoordGeodesicState s{0.0, v0, std::cos(alpha) / (2.0 + std::cos(v0)),
                                      std::sin(alpha)};
        const auto end = oracles::coord_geodesic_rk4(profile, s, 20.0, 5e-4);
        const auto y = traj.state_at(20.0);
        CHECK(std::abs(y[0] - end.u) < 1e-7);
        CHECK(std::abs(y[1] - end.v) < 1e-7);
        // frame components: Q1 = A u', Q2 = v'
        CHECK(std::abs(y[3] - (2.0 + std::cos(end.v)) * end.du) < 1e-7);
        CHECK(std::abs(y[4] - end.dv) < 1e-7);
    }
    SUBCASE("unit-speed C = 1 run pins C3^2 = 1 + K0^2 and drifts below 1e-7") {
        const double v0 = 0.4;
        const double k0 = oracles::torus_K(2.0, 1.0, v0);
        const Trajectory traj = integrate_projected(
            torus, {0.1, v0, std::cos(0.3), std::sin(0.3), 0.0}, 1.0, tight(40.0));
        const FirstIntegrals fi = first_integrals(traj, torus, 1.0);
        CHECK(fi.c3sq_0 == doctest::Approx(1.0 + k0 * k0).epsilon(1e-11));
        CHECK(fi.c3sq_drift < 1e-7);
        CHECK(fi.c2_drift < 1e-7);
    }
    SUBCASE("lifted runs carry C1 = Q3(0)/K(0)") {
        const double k0 = oracles::torus_K(2.0, 1.0, 0.0);
        const Trajectory traj =
            integrate_lifted(torus, {0.0, 0.0, 0.0, 0.2, 0.2, 1.0, 0.0}, tight(40.0));
        CHECK(traj.termination == Termination::Completed);
        const FirstIntegrals fi = first_integrals(traj, torus, 0.0);
        REQUIRE(fi.has_c1);
        CHECK(fi.c1_0 == doctest::Approx(1.0 / k0));
        CHECK(fi.c1_drift < 1e-7);
        CHECK(fi.c2_drift < 1e-7);
        CHECK(fi.c3sq_drift < 1e-7);
    }
    SUBCASE("chart mismatch") {
        const Trajectory traj = integrate_projected(builtin("ellipsoid"),
                                                    {0.0, 0.0, 1.0, 0.0, 0.0}, 0.0, tight(1.0));
        CHECK_THROWS_AS(first_integrals(traj, builtin("ellipsoid"), 0.0), ChartMismatch);
    }
}

TEST_CASE("forbidden region from the conservation law") {
    const SurfaceChart torus = builtin("torus");

    SUBCASE("unit speed from a K = 0 parallel with C = 3 gives K_max = 1/3") {
        const ForbiddenRegion region =
            forbidden_region(torus, {0.0, kPi / 2, 1.0, 0.0, 0.0}, 3.0);
        CHECK(region.K_max == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        // |K| <= 1/3 on the torus R=2, r=1 excludes cos(v) < -1/2
        REQUIRE_FALSE(region.bands.empty());
        bool covers_sigma1 = false, covers_sigma2 = false, covers_inner = false;
        for (const RegionBand& b : region.bands) {
            if (b.contains(kPi / 2)) covers_sigma1 = true;
            if (b.contains(3.0 * kPi / 2)) covers_sigma2 = true;
            if (b.contains(kPi)) covers_inner = true;
        }
        CHECK(covers_sigma1);
        CHECK(covers_sigma2);
        CHECK_FALSE(covers_inner);
        // boundary of |K| = 1/3 sits at cos v = -1/2
        for (const RegionBand& b : region.bands)
            for (double edge : {b.lo, b.hi})
                if (edge > 0.1 && edge < 2.0 * kPi - 0.1)
                    CHECK(std::abs(std::abs(oracles::torus_K(2, 1, edge)) - 1.0 / 3.0) < 1e-9);
    }
    SUBCASE("large C degenerates toward the initial curvature level") {
        const double v0 = 0.3;
        const double k0 = oracles::torus_K(2.0, 1.0, v0);
        const ForbiddenRegion region =
            forbidden_region(torus, {0.0, v0, 1.0, 0.0, 0.0}, 1e6);
        CHECK(std::abs(region.K_max - std::abs(k0)) < 1e-8);
    }
    SUBCASE("integrated trajectories stay inside their band") {
        std::mt19937 rng(8);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (int i = 0; i < 5; ++i) {
            const double v0 = 2.0 * kPi * u01(rng);
            const double alpha = 2.0 * kPi * u01(rng);
            const double C = i % 2 ? 1.0 : 3.0;
            const ProjectedState init{0.0, v0, std::cos(alpha), std::sin(alpha), 0.0};
            const ForbiddenRegion region = forbidden_region(torus, init, C);
            const Trajectory traj = integrate_projected(torus, init, C, tight(20.0));
            for (const TrajectorySample& s : traj.samples) {
                CHECK(std::abs(s.K) <= region.K_max + 1e-7);
                bool inside = false;
                const double v = torus.u2_domain().wrap(s.y[1]);
                for (const RegionBand& b : region.bands)
                    if (v >= b.lo - 1e-6 && v <= b.hi + 1e-6) inside = true;
                CHECK(inside);
            }
        }
    }
    SUBCASE("C = 0 is rejected") {
        CHECK_THROWS_AS(forbidden_region(torus, {0.0, 0.0, 1.0, 0.0, 0.0}, 0.0),
                        InvalidParams);
    }
    SUBCASE("constant curvature degenerates to the whole chart") {
        // on the sphere K_max = sqrt(1/C^2 + K0^2)... >= K0, so the band is
        // everything
        const SurfaceChart sphere = builtin("sphere");
        const ForbiddenRegion region =
            forbidden_region(sphere, {0.0, kPi / 2, 1.0, 0.0, 0.0}, 2.0);
        REQUIRE(region.bands.size() == 1);
        CHECK(region.bands.front().lo == doctest::Approx(sphere.u2_domain().lo));
        CHECK(region.bands.front().hi == doctest::Approx(sphere.u2_domain().hi));
        CHECK(region.K_max > 1.0);
    }
}

TEST_CASE("trajectory graph by quadrature") {
    const SurfaceChart torus = builtin("torus");

    SUBCASE("meridians: C = 0 and C2 = 0 give du1/du2 = 0") {
        const SurfaceChart sphere = builtin("sphere");
        const auto graph =
            graph_quadrature(sphere, 0.0, 0.0, 1.0, 0.8, kPi - 0.8, kPi / 2, 0.25, 32);
        for (const GraphSample& s : graph) CHECK(s.u1 == doctest::Approx(0.25));
    }
    SUBCASE("classical Clairaut case matches the integrated geodesic") {
        const double v0 = 0.2, alpha = 0.4;
        const ProjectedState init{0.0, v0, std::cos(alpha), std::sin(alpha), 0.0};
        const Trajectory traj = integrate_projected(torus, init, 0.0, tight(8.0));

        const double A0 = 2.0 + std::cos(v0);
        const double c2 = A0 * std::cos(alpha);
        const double c3sq = 1.0;
        // compare along the rising branch, before the first turning point
        std::size_t i_turn = traj.samples.size();
        for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i)
            if (traj.samples[i + 1].y[4] <= 0.0) {
                i_turn = i;
                break;
            }
        REQUIRE(i_turn > 4);
        const double v_last = traj.samples[i_turn - 2].y[1];
        const double t_branch = traj.samples[i_turn - 2].t;
        const auto graph =
            graph_quadrature(torus, 0.0, c2, c3sq, v0, v_last, v0, 0.0, 48);
        for (const GraphSample& g : graph) {
            const double u_ode = oracles::u1_at_v(traj, g.u2, 0.0, t_branch);
            CHECK(std::abs(g.u1 - u_ode) < 1e-5);
        }
    }
    SUBCASE("C = 1 matches up to the first turning point") {
        const double v0 = 0.3, alpha = 0.9, C = 1.0;
        const double A0 = 2.0 + std::cos(v0);
        const double k0 = oracles::torus_K(2.0, 1.0, v0);
        const double c2 = A0 * std::cos(alpha) - C * (-std::sin(v0));
        const double c3sq = 1.0 + C * C * k0 * k0;

        const ProjectedState init{0.0, v0, std::cos(alpha), std::sin(alpha), 0.0};
        const Trajectory traj = integrate_projected(torus, init, C, tight(6.0));
        std::size_t i_turn = traj.samples.size();
        for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i)
            if (traj.samples[i + 1].y[4] <= 0.0) {
                i_turn = i;
                break;
            }
        REQUIRE(i_turn > 4);
        const double v_last = traj.samples[i_turn - 2].y[1];
        const double t_branch = traj.samples[i_turn - 2].t;
        const auto graph = graph_quadrature(torus, C, c2, c3sq, v0, v_last, v0, 0.0, 32);
        for (const GraphSample& g : graph)
            CHECK(std::abs(g.u1 - oracles::u1_at_v(traj, g.u2, 0.0, t_branch)) < 1e-5);
    }
    SUBCASE("span containing a turning point raises TurningPoint") {
        const double v0 = 0.3, alpha = 0.9, C = 1.0;
        const double A0 = 2.0 + std::cos(v0);
        const double k0 = oracles::torus_K(2.0, 1.0, v0);
        const double c2 = A0 * std::cos(alpha) + C * std::sin(v0);
        const double c3sq = 1.0 + C * C * k0 * k0;
        const RegionBand span = transversal_span(torus, C, c2, c3sq, v0);
        CHECK(span.hi < 2.0 * kPi);
        CHECK_THROWS_AS(
            graph_quadrature(torus, C, c2, c3sq, v0, span.hi + 0.2, v0, 0.0, 16),
            TurningPoint);
    }
    SUBCASE("non-transversal initial data is rejected") {
        // Q2 = 0 makes the radicand vanish at u2_init
        const double v0 = 0.3;
        const double A0 = 2.0 + std::cos(v0);
        const double k0 = oracles::torus_K(2.0, 1.0, v0);
        CHECK_THROWS_AS(transversal_span(torus, 1.0, A0 + std::sin(v0),
                                         1.0 + k0 * k0, v0),
                        NonTransversal);
    }
}

TEST_CASE("action functional and Euler-Lagrange residual") {
    const SurfaceChart torus = builtin("torus");

    SUBCASE("residual converges to zero at second order on solutions") {
        std::vector<double> hs, rs;
        for (int n : {500, 1000, 2000, 4000}) {
            // fixed-step samples so the spacing is the only discretization
            IntegratorConfig cfg = tight(10.0);
            cfg.method = OdeMethod::Rk4;
            cfg.h_init = 10.0 / n;
            const Trajectory traj = integrate_projected(
                torus, {0.0, 0.5, std::cos(0.7), std::sin(0.7), 0.0}, 1.0, cfg);
            const ActionResult res = lagrangian_action(torus, traj, 1.0, n);
            hs.push_back(10.0 / n);
            rs.push_back(res.max_el_residual);
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = static_cast<int>(hs.size());
        for (int i = 0; i < n; ++i) {
            const double x = std::log(hs[i]), y = std::log(rs[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(slope > 1.7);
        CHECK(slope < 2.3);
    }
    SUBCASE("non-solution parallels have residual bounded away from zero") {
        const Trajectory parallel = curve_trajectory(torus, 0.37, 1.0, 10.0, 2000);
        const ActionResult res = lagrangian_action(torus, parallel, 0.0, 0);
        CHECK(res.max_el_residual > 1e-2);
    }
    SUBCASE("C = 0 action is the energy of a unit-speed geodesic") {
        IntegratorConfig cfg = tight(10.0);
        cfg.method = OdeMethod::Rk4;
        cfg.h_init = 10.0 / 4000;
        const Trajectory geo = integrate_projected(
            torus, {0.0, 0.8, std::cos(0.3), std::sin(0.3), 0.0}, 0.0, cfg);
        const ActionResult res = lagrangian_action(torus, geo, 0.0, 4000);
        CHECK(res.action == doctest::Approx(0.5 * 10.0).epsilon(2e-3));
        CHECK(res.max_el_residual < 1e-3);
    }
}

TEST_CASE("rotational symmetry shifts solutions exactly") {
    const SurfaceChart torus = builtin("torus");
    const double shift = 1.234;
    IntegratorConfig cfg = tight(50.0);
    cfg.method = OdeMethod::Rk4;
    cfg.h_init = 0.005;
    const Trajectory a =
        integrate_projected(torus, {0.2, 0.5, std::cos(0.4), std::sin(0.4), 0.0}, 1.0, cfg);
    const Trajectory b = integrate_projected(
        torus, {0.2 + shift, 0.5, std::cos(0.4), std::sin(0.4), 0.0}, 1.0, cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        sup = std::max(sup, std::abs(b.samples[i].y[0] - a.samples[i].y[0] - shift));
        sup = std::max(sup, std::abs(b.samples[i].y[1] - a.samples[i].y[1]));
        sup = std::max(sup, std::abs(b.samples[i].y[3] - a.samples[i].y[3]));
        sup = std::max(sup, std::abs(b.samples[i].y[4] - a.samples[i].y[4]));
    }
    CHECK(sup < 1e-9);
}
