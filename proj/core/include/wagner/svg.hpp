#pragma once
#include <string>
#include <vector>

#include "wagner/ode.hpp"
#include "wagner/revolution.hpp"
#include "wagner/trajectory_io.hpp"

namespace wagner {

/// Self-contained SVG: the (u1, u2) development on the left and, when the
/// chart has an R^3 realization, a fixed orthographic 3D view on the right.
/// Optional region bands / contours are shaded under the curves.
struct SvgOptions {
    std::vector<RegionBand> bands;           // u2-bands (revolution regions)
    std::vector<ContourPolyline> contours;   // general-chart region boundary
    std::vector<double> sigma_parallels;     // dashed u2 = const lines
    int max_points = 4000;
};

std::string trajectories_svg(const SurfaceChart& chart, const std::vector<Trajectory>& trajs,
                             const SvgOptions& options = {});

void write_trajectories_svg(const std::string& path, const SurfaceChart& chart,
                            const std::vector<Trajectory>& trajs,
                            const SvgOptions& options = {});

}  // namespace wagner
