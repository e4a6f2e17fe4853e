#pragma once
#include <functional>
#include <limits>
#include <string>

#include "wagner/expr.hpp"
#include "wagner/linalg.hpp"

namespace wagner {

/// One coordinate interval of the chart rectangle. Bounds may be infinite;
/// a periodic coordinate covers [lo, lo + period).
struct DomainInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool periodic = false;
    double period = 0.0;

    static DomainInterval periodic_interval(double lo, double period) {
        return {lo, lo + period, true, period};
    }
    static DomainInterval open_interval(double lo, double hi) { return {lo, hi, false, 0.0}; }
    static DomainInterval whole_line() { return {}; }

    bool contains(double x) const { return periodic || (x > lo && x < hi); }
    double wrap(double x) const {
        if (!periodic) return x;
        double y = std::fmod(x - lo, period);
        if (y < 0.0) y += period;
        return lo + y;
    }
};

/// Surface of revolution in normal form: g = A^2(v) du (x) du + dv (x) dv.
/// The profile carries A with derivatives to order 3 via jets.
struct RevolutionProfile {
    Expr A;
    DomainInterval u2;
    double u1_period = 2.0 * 3.14159265358979323846;

    Jet3 jet(double v) const { return eval_jet3(A, v); }
};

/// Frame, structure functions, curvature and its gradient at one point.
/// e1, e2 are coordinate components of the positively oriented orthonormal
/// frame; c112, c212 the components of [e1,e2] in that frame; christoffel
/// holds the connection coefficients gamma[k][i][j] for nabla_{e_i} e_j,
/// antisymmetric in (k, j).
struct FramePointData {
    Vec2 point;
    Vec2 e1, e2;
    double c112 = 0.0, c212 = 0.0;
    double K = 0.0;
    Vec2 gradK;  // frame components (e1 K, e2 K)
    double christoffel[2][2][2] = {};
};

class SurfaceChart {
public:
    enum class Kind { Revolution, Metric, Embedding };

    /// An empty chart; use the factories below to build a usable one.
    SurfaceChart() = default;

    static SurfaceChart revolution(RevolutionProfile profile);
    static SurfaceChart metric(Expr g11, Expr g12, Expr g22, DomainInterval u1,
                               DomainInterval u2);
    static SurfaceChart embedding(Expr x, Expr y, Expr z, DomainInterval u1, DomainInterval u2);

    Kind kind() const { return kind_; }
    const RevolutionProfile* profile() const {
        return kind_ == Kind::Revolution ? &profile_ : nullptr;
    }

    const DomainInterval& u1_domain() const { return u1_; }
    const DomainInterval& u2_domain() const { return u2_; }
    bool in_domain(Vec2 p) const { return u1_.contains(p.x) && u2_.contains(p.y); }
    Vec2 wrap(Vec2 p) const { return {u1_.wrap(p.x), u2_.wrap(p.y)}; }

    /// Metric coefficients at p; throws DegenerateMetric if not positive
    /// definite there.
    Mat2 metric_at(Vec2 p) const;

    /// Metric coefficients with exact first partials (all chart kinds).
    void metric_deriv1(Vec2 p, Deriv1& g11, Deriv1& g12, Deriv1& g22) const;

    /// Metric coefficients with exact partials to total order 2.
    void metric_deriv2(Vec2 p, Deriv2& g11, Deriv2& g12, Deriv2& g22) const;

    /// max(1, sup of |K| sampled over the domain); fixed at construction and
    /// used to scale the near-singular guard.
    double curvature_scale() const { return k_scale_; }

    /// R^3 realization for plotting: the embedding itself, or the standard
    /// rotation embedding of a revolution chart (when |A'| <= 1).
    bool has_embedding() const;
    Vec3 embed_point(Vec2 p) const;

private:
    void compute_curvature_scale();

    Kind kind_ = Kind::Revolution;
    RevolutionProfile profile_;          // Revolution
    Expr g11_, g12_, g22_;               // Metric
    Expr embed_x_, embed_y_, embed_z_;   // Embedding
    DomainInterval u1_, u2_;
    double k_scale_ = 1.0;
};

/// Frame and structure functions only (the cheap part of FramePointData).
struct FrameCore {
    Vec2 e1, e2;
    double c112 = 0.0, c212 = 0.0;
};

FrameCore frame_core(const SurfaceChart& chart, Vec2 p);

/// Frame with structure functions carrying their exact first partials,
/// from second-order jets of the metric coefficients.
struct FrameCoreD {
    Vec2 e1, e2;
    Deriv1 c112, c212;
};

FrameCoreD frame_core_d(const SurfaceChart& chart, Vec2 p);

/// Gaussian curvature. Revolution charts use K = -A''/A; general charts go
/// through the frame and structure functions.
double curvature(const SurfaceChart& chart, Vec2 p);

/// Frame components (e1 K, e2 K) of grad K.
Vec2 grad_curvature(const SurfaceChart& chart, Vec2 p);

/// Second frame-derivatives of K packaged as the four values
/// d2[i][j] = e_{i+1}( e_{j+1}K / K ); throws SingularPoint when K = 0.
struct CurvatureSecondDerivs {
    double d2[2][2];
};
CurvatureSecondDerivs second_curvature_derivs(const SurfaceChart& chart, Vec2 p);

/// Full per-point package: frame, structure functions, Christoffel
/// coefficients, K and grad K.
FramePointData frame_data(const SurfaceChart& chart, Vec2 p);

/// Connection coefficients of the orthonormal frame from the structure
/// functions: gamma^k_ij = (c^k_ij + c^j_ki + c^i_kj)/2, antisymmetric in
/// (k, j).
void christoffel_from_structure(double c112, double c212, double gamma[2][2][2]);

/// Rotation by +pi/2 in the oriented frame: J e1 = e2, J e2 = -e1.
inline Vec2 complex_structure(Vec2 x) { return {-x.y, x.x}; }

/// Near-singular guard threshold for operations that divide by K.
inline double singular_guard(const SurfaceChart& chart) {
    return 1e-12 * chart.curvature_scale();
}

/// Directional derivative of a scalar field along a fixed direction, by
/// 4th-order central differences. `layer` selects the step size: 0 for
/// jet-exact integrands (h = 1e-4 scale), 1 for once-differenced ones,
/// 2 for twice-differenced ones.
double directional_derivative(const SurfaceChart& chart, Vec2 p, Vec2 dir,
                              const std::function<double(Vec2)>& f, int layer);

}  // namespace wagner
