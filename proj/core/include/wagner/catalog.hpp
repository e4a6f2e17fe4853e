#pragma once
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wagner/surface.hpp"

namespace wagner {

/// A built-in surface together with the analytic facts tests use as
/// oracles: a closed-form curvature and the zero-curvature parallels.
struct CatalogEntry {
    std::string name;
    SurfaceChart chart;
    std::function<double(Vec2)> analytic_K;
    std::vector<double> sigma_u2;
};

using ParamMap = std::map<std::string, double>;

/// Built-in fixtures:
///   sphere       K0 (default 1): profile sin(sqrt(K0) v)/sqrt(K0)
///   flat         the flat plane, A = 1 (negative-control fixture)
///   torus        R, r (defaults 2, 1): A = R + r cos(v/r), v periodic
///   ellipsoid    a, b, c (defaults 1, 1.5, 2): trigonometric embedding
///   custom-profile   revolution chart from `expression` (a function of v)
SurfaceChart builtin(const std::string& name, const ParamMap& params = {},
                     const std::string& expression = "");

CatalogEntry catalog_entry(const std::string& name, const ParamMap& params = {});

std::vector<std::string> catalog_names();

/// Grid search plus local refinement for the point of minimal curvature.
Vec2 min_curvature_point(const SurfaceChart& chart, int grid = 96);

}  // namespace wagner
