#pragma once
#include <vector>

#include "wagner/ode.hpp"
#include "wagner/surface.hpp"

namespace wagner {

/// The conserved quantities of a revolution chart along a trajectory:
/// C1 = Q3/K (lifted trajectories only), C2 = A Q1 - C A' (the Clairaut-type
/// quantity), C3^2 = Q1^2 + Q2^2 + C^2 K^2. Drift is measured relative to
/// max(|value at t0|, 1e-3).
struct FirstIntegrals {
    bool has_c1 = false;
    double c1_0 = 0.0, c2_0 = 0.0, c3sq_0 = 0.0;
    double c1_drift = 0.0, c2_drift = 0.0, c3sq_drift = 0.0;
    std::vector<double> c1, c2, c3sq;  // per-sample values
};

FirstIntegrals first_integrals(const Trajectory& traj, const SurfaceChart& chart, double C);

struct RegionBand {
    double lo = 0.0, hi = 0.0;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Curvature bound |K| <= sqrt(|v0|^2 + C^2 K0^2)/|C| from the conservation
/// law, and the u2-bands of the chart where it holds.
struct ForbiddenRegion {
    double K_max = 0.0;
    std::vector<RegionBand> bands;
};

ForbiddenRegion forbidden_region(const SurfaceChart& chart, const ProjectedState& init,
                                 double C);

/// Maximal open interval around u2_init on which the quadrature radicand
/// A^2 (C3^2 - C^2 K^2) - (C2 + C A')^2 stays positive. Throws
/// NonTransversal if it is non-positive at u2_init.
RegionBand transversal_span(const SurfaceChart& chart, double C, double C2, double C3sq,
                            double u2_init);

struct GraphSample {
    double u2 = 0.0, u1 = 0.0;
};

/// Trajectory graph u1(u2) by adaptive quadrature of
///   du1/du2 = (C2 + C A') / (A sqrt(A^2 (C3^2 - C^2 K^2) - (C2 + C A')^2)),
/// following the branch with increasing u2 and Q2 > 0. Throws TurningPoint
/// if the radicand vanishes inside the requested span.
std::vector<GraphSample> graph_quadrature(const SurfaceChart& chart, double C, double C2,
                                          double C3sq, double u2_lo, double u2_hi,
                                          double u2_init, double u1_init, int n_samples = 64);

/// Action of L = |x'|^2/2 - C A'(u2) u1' - C^2 K^2/2 over the trajectory and
/// the maximum discrete Euler-Lagrange residual at interior samples
/// (central differences of dL/dx' and dL/dx). The trajectory is resampled
/// uniformly when n_resample > 0.
struct ActionResult {
    double action = 0.0;
    double max_el_residual = 0.0;
};

ActionResult lagrangian_action(const SurfaceChart& chart, const Trajectory& traj, double C,
                               int n_resample = 0);

}  // namespace wagner
