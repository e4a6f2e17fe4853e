#pragma once
#include <array>
#include <cmath>
#include <vector>

#include "wagner/surface.hpp"

namespace wagner {

/// Phase point of the projected equation: coordinates plus velocity
/// components in the orthonormal frame (so du/dt is recovered through the
/// frame's coordinate components).
struct ProjectedState {
    double u1 = 0.0, u2 = 0.0;
    double q1 = 0.0, q2 = 0.0;
    double t = 0.0;
};

/// Phase point of the lifted geodesic system; phi is kept unwrapped here,
/// wrapping happens at output time.
struct LiftedState {
    double u1 = 0.0, u2 = 0.0, phi = 0.0;
    double q1 = 0.0, q2 = 0.0, q3 = 0.0;
    double t = 0.0;
};

enum class OdeMethod { Rk4, Rkf45 };

struct IntegratorConfig {
    OdeMethod method = OdeMethod::Rkf45;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double h_init = 1e-3;
    double h_min = 1e-12;
    double h_max = 0.25;
    double t0 = 0.0;
    double t1 = 10.0;
    long max_steps = 4'000'000;
    bool detect_events = true;
};

/// A detected intersection of the projection with the zero-curvature set,
/// localized to |dt| < 1e-10. vertical_speed is |C K^2| there; grazing
/// marks a touch of K = 0 without sign change.
struct SigmaCrossing {
    double t = 0.0;
    Vec2 point;
    double vertical_speed = 0.0;
    bool grazing = false;
};

enum class Termination { Completed, SingularApproach };

/// State layout: y = [u1, u2, phi, q1, q2, q3]; projected trajectories keep
/// phi and q3 frozen at zero. Coordinates are stored unwrapped for
/// continuity; the fiber angle splits into a canonical value mod 2 pi plus
/// a winding count. The stored derivative enables cubic Hermite dense
/// output.
struct TrajectorySample {
    double t = 0.0;
    std::array<double, 6> y{};
    std::array<double, 6> dy{};
    double K = 0.0;
    double c1 = 0.0, c2 = 0.0, c3sq = 0.0;  // NaN where not defined

    long phi_winding() const {
        return static_cast<long>(std::floor(y[2] / (2.0 * 3.14159265358979323846)));
    }
    double phi_wrapped() const {
        return y[2] - 2.0 * 3.14159265358979323846 * static_cast<double>(phi_winding());
    }
};

struct IntegratorStats {
    long n_steps = 0;
    long n_rejected = 0;
    double min_step = 0.0;  // smallest accepted step, ignoring the final clip
};

struct Trajectory {
    enum class Kind { Projected, Lifted };

    Kind kind = Kind::Projected;
    double C = 0.0;
    std::vector<TrajectorySample> samples;
    std::vector<SigmaCrossing> crossings;
    Termination termination = Termination::Completed;
    IntegratorStats stats;

    double t_begin() const { return samples.front().t; }
    double t_end() const { return samples.back().t; }

    /// Cubic Hermite interpolation between stored samples.
    std::array<double, 6> state_at(double t) const;
};

/// Integrate the projected equation; smooth across K = 0, no special
/// handling there. Throws StepUnderflow, LeftDomain, MaxStepsExceeded.
Trajectory integrate_projected(const SurfaceChart& chart, const ProjectedState& init, double C,
                               const IntegratorConfig& cfg);

/// Integrate the lifted geodesic system. Requires K != 0 at the initial
/// point; if the trajectory approaches or would cross the singular set it
/// is truncated at the last safe sample (termination SingularApproach).
Trajectory integrate_lifted(const SurfaceChart& chart, const LiftedState& init,
                            const IntegratorConfig& cfg);

/// Lift a projected solution through the fiber point phi0: horizontal lift
/// plus the rotation alpha(t) = C * integral of K^2, so Q3 = C K along the
/// result. Quadratures run on the dense output of gamma.
Trajectory lift_solution(const SurfaceChart& chart, const Trajectory& gamma, double phi0,
                         double C);

std::vector<SigmaCrossing> detect_sigma_crossings(const Trajectory& traj,
                                                  const SurfaceChart& chart);

}  // namespace wagner
