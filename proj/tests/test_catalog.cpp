#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wagner/catalog.hpp"

using namespace wagner;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("analytic curvature oracles match the computed curvature") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const struct {
        const char* name;
        ParamMap params;
    } cases[] = {{"sphere", {{"K0", 1.0}}},
                 {"sphere", {{"K0", 4.0}}},
                 {"torus", {}},
                 {"ellipsoid", {}},
                 {"flat", {}}};
    for (const auto& cse : cases) {
        const CatalogEntry entry = catalog_entry(cse.name, cse.params);
        const DomainInterval& dom = entry.chart.u2_domain();
        const double lo = dom.lo + 0.05 * (dom.hi - dom.lo);
        const double hi = dom.hi - 0.05 * (dom.hi - dom.lo);
        for (int i = 0; i < 50; ++i) {
            const Vec2 p{2.0 * kPi * u01(rng), lo + (hi - lo) * u01(rng)};
            CAPTURE(cse.name);
            CAPTURE(p.y);
            CHECK(std::abs(curvature(entry.chart, p) - entry.analytic_K(p)) < 1e-10);
        }
    }
}

TEST_CASE("torus fixture") {
    const CatalogEntry torus = catalog_entry("torus");
    REQUIRE(torus.sigma_u2.size() == 2);
    CHECK(torus.sigma_u2[0] == doctest::Approx(kPi / 2));
    CHECK(torus.sigma_u2[1] == doctest::Approx(3.0 * kPi / 2));
    CHECK(std::abs(curvature(torus.chart, {0.0, torus.sigma_u2[0]})) < 1e-12);

    SUBCASE("total curvature integrates to zero") {
        // integral of K dA = 2 pi * integral K(v) A(v) dv over one period
        const int n = 2048;
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto f = [&](double v) {
                const Jet3 a = torus.chart.profile()->jet(v);
                return (-a.d2 / a.value) * a.value;
            };
            const double v0 = 2.0 * kPi * i / n, v1 = 2.0 * kPi * (i + 1) / n;
            total += (v1 - v0) / 6.0 * (f(v0) + 4.0 * f(0.5 * (v0 + v1)) + f(v1));
        }
        CHECK(std::abs(2.0 * kPi * total) < 1e-6);
    }
}

TEST_CASE("ellipsoid fixture") {
    const CatalogEntry ell = catalog_entry("ellipsoid");

    SUBCASE("curvature is positive on a dense grid and matches the closed form") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const int n = 100;
        for (int i = 0; i < n; ++i) {
            const double u = 2.0 * kPi * i / n;
            for (int j = 1; j < 12; ++j) {
                const double v = -1.4 + 2.8 * j / 12.0;
                const double k = curvature(ell.chart, {u, v});
                CHECK(k > 0.0);
            }
        }
        for (int i = 0; i < 50; ++i) {
            const Vec2 p{2.0 * kPi * u01(rng), 2.6 * (u01(rng) - 0.5)};
            CHECK(std::abs(curvature(ell.chart, p) -
                           oracles::ellipsoid_K(1.0, 1.5, 2.0, p.x, p.y)) < 1e-8);
        }
    }
    SUBCASE("the minimal-curvature point sits on the shortest axis") {
        const Vec2 p = min_curvature_point(ell.chart);
        CHECK(std::abs(p.y) < 1e-4);
        const double du0 = std::abs(std::remainder(p.x, 2.0 * kPi));
        const double du_pi = std::abs(std::remainder(p.x - kPi, 2.0 * kPi));
        CHECK(std::min(du0, du_pi) < 1e-4);
        CHECK(curvature(ell.chart, p) == doctest::Approx(1.0 / 9.0).epsilon(1e-8));
    }
}

TEST_CASE("catalog rejects bad parameters") {
    CHECK_THROWS_AS(builtin("torus", {{"R", 1.0}, {"r", 2.0}}), InvalidParams);
    CHECK_THROWS_AS(builtin("torus", {{"R", 2.0}, {"r", -1.0}}), InvalidParams);
    CHECK_THROWS_AS(builtin("sphere", {{"K0", -1.0}}), InvalidParams);
    CHECK_THROWS_AS(builtin("ellipsoid", {{"a", 0.0}}), InvalidParams);
    CHECK_THROWS_AS(builtin("nonsense"), UnknownSurface);
    CHECK_THROWS_AS(builtin("custom-profile"), InvalidParams);
    CHECK_THROWS_AS(builtin("custom-profile", {}, "sin(u)"), InvalidParams);
}

TEST_CASE("custom profiles parse and evaluate") {
    const SurfaceChart chart =
        builtin("custom-profile", {{"u2_lo", -2.0}, {"u2_hi", 2.0}}, "2 + cos(v)/2");
    CHECK(chart.kind() == SurfaceChart::Kind::Revolution);
    const double k = curvature(chart, {0.0, 0.5});
    // K = -A''/A with A = 2 + cos(v)/2
    const double expect = 0.5 * std::cos(0.5) / (2.0 + 0.5 * std::cos(0.5));
    CHECK(k == doctest::Approx(expect).epsilon(1e-12));
}
