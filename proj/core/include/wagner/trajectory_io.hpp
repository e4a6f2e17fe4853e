#pragma once
#include <string>
#include <vector>

#include "wagner/ode.hpp"
#include "wagner/revolution.hpp"
#include "wagner/wagner_lift.hpp"

namespace wagner {

/// Trajectory CSV with the fixed header
///   t,u1,u2,phi,Q1,Q2,Q3,K,C1,C2,C3sq
/// Numbers carry 17 significant digits; fields without a defined value stay
/// empty (phi, Q3, C1 on projected runs; C2, C3sq off revolution charts).
/// Periodic coordinates are wrapped here, at output time only.
std::string trajectory_csv(const Trajectory& traj, const SurfaceChart& chart);

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const SurfaceChart& chart);

/// Region report: {"K_max", "bands": [{"u2_lo","u2_hi"}]} for revolution
/// charts; general charts add the sampled contour of |K| = K_max as
/// polylines in (u1, u2).
struct ContourPolyline {
    std::vector<Vec2> points;
};

std::string region_report_json(double K_max, const std::vector<RegionBand>& bands,
                               const std::vector<ContourPolyline>& contours);

/// |K| = level contour on a general chart by marching squares.
std::vector<ContourPolyline> curvature_contour(const SurfaceChart& chart, double level,
                                               int grid = 192);

/// Tables report for one point: the closed-form tables plus the deltas
/// against their numerical verification routes.
std::string tables_report_json(const SurfaceChart& chart, Vec2 p);

/// First-integral drift report.
std::string invariants_report_json(const FirstIntegrals& fi, const Trajectory& traj);

std::string graph_csv(const std::vector<GraphSample>& graph);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace wagner
