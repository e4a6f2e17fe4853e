#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wagner/catalog.hpp"
#include "wagner/wagner_lift.hpp"

using namespace wagner;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("lifted frame components") {
    SUBCASE("flat chart: E1 = e1, E2 = e2, E3 = 0 and singular") {
        const SurfaceChart flat = builtin("flat");
        const LiftPointData d = lift_frame(flat, {0.3, 0.2}, 0.0);
        CHECK(d.E1.x == doctest::Approx(1.0));
        CHECK(d.E1.z == 0.0);
        CHECK(d.E2.y == doctest::Approx(1.0));
        CHECK(d.E3.z == doctest::Approx(0.0));
        CHECK(d.singular);
    }
    SUBCASE("unit sphere: E3 = dphi") {
        const SurfaceChart sphere = builtin("sphere");
        const LiftPointData d = lift_frame(sphere, {0.1, 1.0}, 0.4);
        CHECK(d.E3.z == doctest::Approx(1.0).epsilon(1e-12));
        CHECK_FALSE(d.singular);
    }
    SUBCASE("torus on the zero-curvature parallel: E3 = 0, flagged singular") {
        const SurfaceChart torus = builtin("torus");
        const LiftPointData d = lift_frame(torus, {0.0, kPi / 2}, 0.0);
        CHECK(std::abs(d.E3.z) < 1e-12);
        CHECK(d.singular);
    }
}

TEST_CASE("nonholonomity equals the curvature") {
    CHECK(nonholonomity(builtin("sphere"), {0.2, 0.9}) == doctest::Approx(1.0));
    CHECK(nonholonomity(builtin("flat"), {0.2, 0.9}) == doctest::Approx(0.0));

    // vertical part of [E1, E2] by an independent bracket, at random points
    const SurfaceChart torus = builtin("torus");
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        const Vec2 p{2.0 * kPi * u01(rng), 2.0 * kPi * u01(rng)};
        const auto field = [&](int idx) {
            return std::function<Vec3(Vec3)>([&, idx](Vec3 q) {
                const LiftPointData d = lift_frame(torus, {q.x, q.y}, q.z);
                return idx == 0 ? d.E1 : d.E2;
            });
        };
        const Vec3 br = oracles::fd_bracket3(field(0), field(1), {p.x, p.y, 0.0});
        // decompose in (E1, E2, dphi): the dphi coefficient is the vertical part
        const LiftPointData d = lift_frame(torus, p, 0.0);
        const Mat3 basis = Mat3::from_columns(d.E1, d.E2, {0.0, 0.0, 1.0});
        const Vec3 coeff = basis.solve(br);
        CHECK(std::abs(coeff.z - nonholonomity(torus, p)) < 1e-6);
    }
}

TEST_CASE("lifted structure functions") {
    SUBCASE("unit sphere: chat3_12 = 1, curvature terms vanish") {
        const SurfaceChart sphere = builtin("sphere");
        double c[3][3][3];
        const double v = 0.9;
        lift_structure_functions(sphere, {0.3, v}, c);
        CHECK(c[2][0][1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c[2][0][2] == doctest::Approx(0.0));
        CHECK(c[2][1][2] == doctest::Approx(0.0));
        CHECK(c[0][0][1] == doctest::Approx(std::cos(v) / std::sin(v)).epsilon(1e-10));
        CHECK(c[1][0][1] == doctest::Approx(0.0));
        // entries outside the table vanish
        CHECK(c[0][0][2] == 0.0);
        CHECK(c[1][0][2] == 0.0);
        CHECK(c[0][1][2] == 0.0);
        CHECK(c[1][1][2] == 0.0);
    }
    SUBCASE("all nine entries match finite-difference brackets on the torus") {
        const SurfaceChart torus = builtin("torus");
        const Vec2 p{0.4, kPi / 4};
        double c[3][3][3];
        lift_structure_functions(torus, p, c);

        const auto field = [&](int idx) {
            return std::function<Vec3(Vec3)>([&, idx](Vec3 q) {
                const LiftPointData d = lift_frame(torus, {q.x, q.y}, q.z);
                return idx == 0 ? d.E1 : (idx == 1 ? d.E2 : d.E3);
            });
        };
        const LiftPointData d = lift_frame(torus, p, 0.0);
        const Mat3 basis = Mat3::from_columns(d.E1, d.E2, d.E3);
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const Vec3 br =
                    oracles::fd_bracket3(field(i), field(j), {p.x, p.y, 0.0});
                const Vec3 coeff = basis.solve(br);
                for (int k = 0; k < 3; ++k) {
                    CAPTURE(i);
                    CAPTURE(j);
                    CAPTURE(k);
                    CHECK(std::abs(c[k][i][j] - coeff[k]) < 1e-6);
                }
            }
    }
    SUBCASE("singular point raises") {
        double c[3][3][3];
        CHECK_THROWS_AS(lift_structure_functions(builtin("torus"), {0.0, kPi / 2}, c),
                        SingularPoint);
        CHECK_THROWS_AS(lift_structure_functions(builtin("flat"), {0.0, 0.0}, c),
                        SingularPoint);
    }
}

TEST_CASE("lifted connection coefficients") {
    SUBCASE("the constant entries are exactly +-1/2 on any chart") {
        for (const char* name : {"sphere", "torus"}) {
            const SurfaceChart chart = builtin(name);
            double g[3][3][3];
            lift_connection(chart, {0.7, 0.8}, g);
            CHECK(g[0][1][2] == 0.5);   // Ghat^1_23
            CHECK(g[1][0][2] == -0.5);  // Ghat^2_13
            CHECK(g[0][2][1] == 0.5);   // Ghat^1_32
            CHECK(g[2][0][1] == 0.5);   // Ghat^3_12
            CHECK(g[2][1][0] == -0.5);  // Ghat^3_21
            CHECK(g[0][0][2] == 0.0);   // Ghat^1_13
            CHECK(g[1][1][2] == 0.0);   // Ghat^2_23
        }
    }
    SUBCASE("constant curvature kills the K-gradient entries") {
        double g[3][3][3];
        lift_connection(builtin("sphere"), {0.2, 1.1}, g);
        CHECK(g[0][2][2] == doctest::Approx(0.0));  // Ghat^1_33
        CHECK(g[1][2][2] == doctest::Approx(0.0));  // Ghat^2_33
    }
    SUBCASE("antisymmetry and Koszul consistency") {
        const SurfaceChart torus = builtin("torus");
        const Vec2 p{1.1, 0.6};
        double g[3][3][3], gk[3][3][3];
        lift_connection(torus, p, g);
        lift_connection_koszul(torus, p, gk);
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    CHECK(g[k][i][j] == -g[j][i][k]);
                    CHECK(std::abs(g[k][i][j] - gk[k][i][j]) < 1e-10);
                }
    }
}

TEST_CASE("lifted curvature components") {
    SUBCASE("unit sphere: diagonal -1/4, mixed terms zero") {
        const RhatComponents r = lift_curvature(builtin("sphere"), {0.4, 1.2});
        CHECK(r.r1212 == doctest::Approx(-0.25).epsilon(1e-12));
        CHECK(r.r1313 == doctest::Approx(-0.25).epsilon(1e-9));
        CHECK(r.r2323 == doctest::Approx(-0.25).epsilon(1e-9));
        CHECK(std::abs(r.r1213) < 1e-10);
        CHECK(std::abs(r.r1223) < 1e-10);
        CHECK(std::abs(r.r1323) < 1e-10);
    }
    SUBCASE("r1212 = 3/4 - K0 for spheres of curvature K0") {
        for (double k0 : {1.0, 4.0, 0.25}) {
            const SurfaceChart s = builtin("sphere", {{"K0", k0}});
            const double v_eq = kPi / (2.0 * std::sqrt(k0));
            const RhatComponents r = lift_curvature(s, {0.3, v_eq * 0.8});
            CHECK(std::abs(r.r1212 - (0.75 - k0)) < 1e-12);
        }
    }
    SUBCASE("all six components match the connection-derivative route") {
        const SurfaceChart torus = builtin("torus");
        const Vec2 p{0.9, kPi / 4};
        const RhatComponents r = lift_curvature(torus, p);
        const RhatFull fd = lift_curvature_fd(torus, p);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        CAPTURE(i); CAPTURE(j); CAPTURE(k); CAPTURE(l);
                        CHECK(std::abs(r.full(i, j, k, l) - fd.r[l][i][j][k]) < 1e-6);
                    }
    }
    SUBCASE("pair symmetries of the assembled tensor") {
        const RhatFull fd = lift_curvature_fd(builtin("torus"), {0.9, kPi / 4});
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        const double r_ijkl = fd.r[l][i][j][k];
                        CHECK(std::abs(r_ijkl + fd.r[l][j][i][k]) < 2e-6);   // -R_jikl
                        CHECK(std::abs(r_ijkl + fd.r[k][i][j][l]) < 2e-6);   // -R_ijlk
                        CHECK(std::abs(r_ijkl - fd.r[j][k][l][i]) < 2e-6);   // R_klij
                    }
    }
}

TEST_CASE("lifted metric matrices") {
    const SurfaceChart torus = builtin("torus");
    const Vec2 p{0.5, 0.7};
    const double K = curvature(torus, p);

    SUBCASE("identity in the lifted orthonormal frame") {
        const LiftPointData d = lift_frame(torus, p, 0.0);
        const Mat3 B = Mat3::from_columns(d.E1, d.E2, d.E3);
        const Mat3 G = ghat_coord(torus, p);
        const Mat3 I = B.transpose() * G * B;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(I.at(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
    SUBCASE("diag(1, 1, 1/K^2) in the horizontal-lift frame, dual diag(1, 1, K^2)") {
        const LiftPointData d = lift_frame(torus, p, 0.0);
        const Mat3 H = Mat3::from_columns(d.E1, d.E2, {0.0, 0.0, 1.0});
        const Mat3 G = ghat_coord(torus, p);
        const Mat3 M = H.transpose() * G * H;
        CHECK(M.at(0, 0) == doctest::Approx(1.0));
        CHECK(M.at(1, 1) == doctest::Approx(1.0));
        CHECK(M.at(2, 2) == doctest::Approx(1.0 / (K * K)));
        CHECK(std::abs(M.at(0, 1)) < 1e-12);
        CHECK(std::abs(M.at(0, 2)) < 1e-12);
        CHECK(std::abs(M.at(1, 2)) < 1e-12);

        // product of the matrix and its dual is the identity
        const Mat3 P = G * ghat_dual_coord(torus, p);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(P.at(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
    SUBCASE("dual tensor extends continuously across the singular set with rank 2") {
        const double v_sing = kPi / 2;
        const Mat3 at_sigma = ghat_dual_coord(torus, {0.0, v_sing});
        CHECK(std::abs(at_sigma.det()) < 1e-20);
        // the horizontal 2x2 block stays nondegenerate
        const double minor = at_sigma.at(0, 0) * at_sigma.at(1, 1) -
                             at_sigma.at(0, 1) * at_sigma.at(1, 0);
        CHECK(std::abs(minor) > 1e-6);
        for (double dv : {1e-7, -1e-7}) {
            const Mat3 nearby = ghat_dual_coord(torus, {0.0, v_sing + dv});
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    CHECK(std::abs(nearby.at(i, j) - at_sigma.at(i, j)) < 1e-5);
        }
        CHECK_THROWS_AS(ghat_coord(torus, {0.0, v_sing}), SingularPoint);
    }
}

TEST_CASE("killing-field residuals of the lifted metric") {
    const SurfaceChart torus = builtin("torus");
    const Vec2 p{0.8, kPi / 4};
    const double phi = 0.3;

    CHECK(lie_derivative_residual(torus, LiftKilling::Vertical, p, phi) < 1e-6);
    CHECK(lie_derivative_residual(torus, LiftKilling::Rotational, p, phi) < 1e-6);

    // deliberately non-Killing field u2 d1
    const CoordField bad = [](double, double u2, double) { return Vec3{u2, 0.0, 0.0}; };
    CHECK(lie_derivative_residual(torus, bad, p, phi) > 1e-2);

    CHECK_THROWS_AS(lie_derivative_residual(torus, LiftKilling::Vertical, {0.0, kPi / 2}, 0.0),
                    SingularPoint);
}

TEST_CASE("singular parallels of revolution charts") {
    SUBCASE("torus has the two K = 0 parallels") {
        const SingularSetInfo info = singular_parallels(builtin("torus"));
        REQUIRE(info.roots.size() == 2);
        CHECK(info.roots[0] == doctest::Approx(kPi / 2).epsilon(1e-9));
        CHECK(info.roots[1] == doctest::Approx(3 * kPi / 2).epsilon(1e-9));
        CHECK_FALSE(info.grazing[0]);
        CHECK_FALSE(info.grazing[1]);
    }
    SUBCASE("sphere has none") {
        CHECK(singular_parallels(builtin("sphere")).roots.empty());
    }
    SUBCASE("a double root of K is reported as grazing") {
        // A = exp(-v^4/12) gives K = v^2 (1 - v^4/9): a touch at v = 0
        const SurfaceChart chart =
            builtin("custom-profile", {{"u2_lo", -1.5}, {"u2_hi", 1.5}}, "exp(-v^4/12)");
        const SingularSetInfo info = singular_parallels(chart);
        REQUIRE(info.roots.size() == 1);
        CHECK(std::abs(info.roots[0]) < 1e-5);
        CHECK(info.grazing[0]);
    }
    SUBCASE("identically flat charts are flagged") {
        CHECK(singular_parallels(builtin("flat")).identically_zero);
    }
    SUBCASE("non-revolution charts are rejected") {
        CHECK_THROWS_AS(singular_parallels(builtin("ellipsoid")), ChartMismatch);
    }
}

TEST_CASE("table verification deltas stay small across catalog surfaces") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const struct {
        const char* name;
        ParamMap params;
    } surfaces[] = {{"sphere", {{"K0", 1.0}}},
                    {"sphere", {{"K0", 4.0}}},
                    {"torus", {{"R", 2.0}, {"r", 1.0}}},
                    {"ellipsoid", {{"a", 1.0}, {"b", 1.5}, {"c", 2.0}}}};
    for (const auto& sd : surfaces) {
        const SurfaceChart chart = builtin(sd.name, sd.params);
        const SingularSetInfo sigma = chart.kind() == SurfaceChart::Kind::Revolution
                                          ? singular_parallels(chart)
                                          : SingularSetInfo{};
        int tested = 0;
        while (tested < 50) {
            Vec2 p;
            if (std::string(sd.name) == "ellipsoid") {
                p = {2.0 * kPi * u01(rng), 2.4 * (u01(rng) - 0.5)};
            } else {
                const DomainInterval& dom = chart.u2_domain();
                const double lo = dom.lo + 0.08 * (dom.hi - dom.lo);
                const double hi = dom.hi - 0.08 * (dom.hi - dom.lo);
                p = {2.0 * kPi * u01(rng), lo + (hi - lo) * u01(rng)};
                bool near_sigma = false;
                for (double root : sigma.roots)
                    if (std::abs(p.y - root) < 0.2) near_sigma = true;
                if (near_sigma) continue;
            }
            const TableVerification v = verify_tables(chart, p);
            CAPTURE(sd.name);
            CAPTURE(p.x);
            CAPTURE(p.y);
            CHECK(v.max_delta_c < 1e-6);
            CHECK(v.max_delta_gamma < 1e-10);
            CHECK(v.max_delta_r < 1e-6);
            ++tested;
        }
    }
}
