#pragma once
#include <functional>
#include <vector>

#include "wagner/surface.hpp"

namespace wagner {

/// The six independent curvature components of the lifted metric in the
/// orthonormal frame E1,E2,E3, stored as R_{ijkl} for (ij),(kl) in
/// {12,13,23}. full() recovers any component through the pair symmetries
/// R_ijkl = -R_jikl = -R_ijlk = R_klij.
struct RhatComponents {
    double r1212 = 0.0, r1213 = 0.0, r1223 = 0.0;
    double r1313 = 0.0, r1323 = 0.0, r2323 = 0.0;

    double full(int i, int j, int k, int l) const;
};

/// Frame and invariants of the lifted metric at one fiber point.
/// E1 = e1 + c112 dphi, E2 = e2 + c212 dphi, E3 = K dphi, written in the
/// (d1, d2, dphi) coordinate frame. E3 vanishes exactly where K = 0; the
/// table fields are only meaningful when `singular` is false.
struct LiftPointData {
    FramePointData base;
    double phi = 0.0;
    Vec3 E1, E2, E3;
    bool singular = false;
    double c_hat[3][3][3] = {};
    double gamma_hat[3][3][3] = {};
    RhatComponents r_hat;
};

LiftPointData lift_frame(const SurfaceChart& chart, Vec2 p, double phi);

/// Vertical component of the nonholonomity tensor N(E1h, E2h) = K dphi.
double nonholonomity(const SurfaceChart& chart, Vec2 p);

/// Structure functions of the lifted frame: chat^1_12 = c112,
/// chat^2_12 = c212, chat^3_12 = 1, chat^3_13 = e1K/K, chat^3_23 = e2K/K,
/// all other independent entries zero. Throws SingularPoint when K = 0.
void lift_structure_functions(const SurfaceChart& chart, Vec2 p, double c_hat[3][3][3]);

/// Connection coefficients of the lifted Levi-Civita connection
/// (antisymmetric in upper and last lower index). Throws SingularPoint.
void lift_connection(const SurfaceChart& chart, Vec2 p, double gamma_hat[3][3][3]);

/// Closed-form curvature components of the lifted metric; in particular
/// R_1212 = 3/4 - K. Throws SingularPoint.
RhatComponents lift_curvature(const SurfaceChart& chart, Vec2 p);

/// Matrix of the lifted metric in the (d1, d2, dphi) coordinate frame.
/// Throws SingularPoint on the singular set.
Mat3 ghat_coord(const SurfaceChart& chart, Vec2 p);

/// Matrix of the dual tensor in the same frame; defined for every point
/// and of rank 2 exactly where K = 0.
Mat3 ghat_dual_coord(const SurfaceChart& chart, Vec2 p);

/// Killing-identity residual max |X ghat(Ei,Ej) - ghat([X,Ei],Ej)
/// - ghat(Ei,[X,Ej])| over frame pairs, brackets by finite differences.
/// The field is given by its (d1, d2, dphi) components as a function of
/// (u1, u2, phi).
using CoordField = std::function<Vec3(double u1, double u2, double phi)>;
double lie_derivative_residual(const SurfaceChart& chart, const CoordField& field, Vec2 p,
                               double phi);

/// The two infinitesimal isometries of a revolution chart: the fiber
/// rotation dphi and the base rotation d1.
enum class LiftKilling { Vertical, Rotational };
double lie_derivative_residual(const SurfaceChart& chart, LiftKilling field, Vec2 p,
                               double phi);

/// Zeros of K(u2) on a revolution chart: the singular parallels.
struct SingularSetInfo {
    std::vector<double> roots;
    std::vector<bool> grazing;  // touched zero without sign change
    double tol = 0.0;
    bool identically_zero = false;
};
SingularSetInfo singular_parallels(const SurfaceChart& chart, int n_samples = 4096);

// Independent numerical verification routes for the closed-form tables;
// used by the `tables` subcommand and the acceptance suite.

/// Structure functions from finite-difference Lie brackets of the lifted
/// frame fields.
void lift_structure_functions_fd(const SurfaceChart& chart, Vec2 p, double c_hat[3][3][3]);

/// Connection coefficients reproduced from the (closed-form) structure
/// functions through the Koszul-type formula.
void lift_connection_koszul(const SurfaceChart& chart, Vec2 p, double gamma_hat[3][3][3]);

/// Full curvature tensor R^l_{ijk} assembled numerically from the
/// connection table and its frame derivatives.
struct RhatFull {
    double r[3][3][3][3] = {};  // [l][i][j][k]
};
RhatFull lift_curvature_fd(const SurfaceChart& chart, Vec2 p);

struct TableVerification {
    double max_delta_c = 0.0;
    double max_delta_gamma = 0.0;
    double max_delta_r = 0.0;
};
TableVerification verify_tables(const SurfaceChart& chart, Vec2 p);

}  // namespace wagner
