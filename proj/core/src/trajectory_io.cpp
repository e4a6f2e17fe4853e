#include "wagner/trajectory_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace wagner {

namespace {

using nlohmann::json;

std::string num17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void append_field(std::string& row, double v, bool defined) {
    if (defined && std::isfinite(v)) row += num17(v);
    row += ',';
}

double wrap_2pi(double phi) {
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    double w = std::fmod(phi, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj, const SurfaceChart& chart) {
    std::string out = "t,u1,u2,phi,Q1,Q2,Q3,K,C1,C2,C3sq\n";
    const bool lifted = traj.kind == Trajectory::Kind::Lifted;
    for (const TrajectorySample& s : traj.samples) {
        std::string row;
        append_field(row, s.t, true);
        append_field(row, chart.u1_domain().wrap(s.y[0]), true);
        append_field(row, chart.u2_domain().wrap(s.y[1]), true);
        append_field(row, wrap_2pi(s.y[2]), lifted);
        append_field(row, s.y[3], true);
        append_field(row, s.y[4], true);
        append_field(row, s.y[5], lifted);
        append_field(row, s.K, true);
        append_field(row, s.c1, lifted);
        append_field(row, s.c2, true);
        append_field(row, s.c3sq, true);
        row.back() = '\n';
        out += row;
    }
    return out;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const SurfaceChart& chart) {
    write_text_file(path, trajectory_csv(traj, chart));
}

std::string region_report_json(double K_max, const std::vector<RegionBand>& bands,
                               const std::vector<ContourPolyline>& contours) {
    json out;
    out["K_max"] = K_max;
    out["bands"] = json::array();
    for (const RegionBand& b : bands) out["bands"].push_back({{"u2_lo", b.lo}, {"u2_hi", b.hi}});
    if (!contours.empty()) {
        out["contours"] = json::array();
        for (const ContourPolyline& c : contours) {
            json poly = json::array();
            for (const Vec2& p : c.points) poly.push_back({p.x, p.y});
            out["contours"].push_back(poly);
        }
    }
    return out.dump(2) + "\n";
}

std::vector<ContourPolyline> curvature_contour(const SurfaceChart& chart, double level,
                                               int grid) {
    const DomainInterval& du = chart.u1_domain();
    const DomainInterval& dv = chart.u2_domain();
    const double ulo = std::isfinite(du.lo) ? du.lo : -10.0;
    const double uhi = std::isfinite(du.hi) ? du.hi : 10.0;
    const double vlo = std::isfinite(dv.lo) ? dv.lo : -10.0;
    const double vhi = std::isfinite(dv.hi) ? dv.hi : 10.0;

    std::vector<std::vector<double>> f(grid + 1, std::vector<double>(grid + 1));
    for (int i = 0; i <= grid; ++i)
        for (int j = 0; j <= grid; ++j) {
            const Vec2 p{ulo + (uhi - ulo) * i / grid, vlo + (vhi - vlo) * j / grid};
            try {
                f[i][j] = std::abs(curvature(chart, p)) - level;
            } catch (const NumericalError&) {
                f[i][j] = 1.0;
            }
        }

    // marching squares, emitted as independent segments
    std::vector<ContourPolyline> out;
    const auto interp = [&](double xa, double ya, double fa, double xb, double yb, double fb) {
        const double t = fa / (fa - fb);
        return Vec2{xa + t * (xb - xa), ya + t * (yb - ya)};
    };
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const double x0 = ulo + (uhi - ulo) * i / grid, x1 = ulo + (uhi - ulo) * (i + 1) / grid;
            const double y0 = vlo + (vhi - vlo) * j / grid, y1 = vlo + (vhi - vlo) * (j + 1) / grid;
            const double f00 = f[i][j], f10 = f[i + 1][j], f01 = f[i][j + 1],
                         f11 = f[i + 1][j + 1];
            std::vector<Vec2> pts;
            if ((f00 < 0.0) != (f10 < 0.0)) pts.push_back(interp(x0, y0, f00, x1, y0, f10));
            if ((f10 < 0.0) != (f11 < 0.0)) pts.push_back(interp(x1, y0, f10, x1, y1, f11));
            if ((f01 < 0.0) != (f11 < 0.0)) pts.push_back(interp(x0, y1, f01, x1, y1, f11));
            if ((f00 < 0.0) != (f01 < 0.0)) pts.push_back(interp(x0, y0, f00, x0, y1, f01));
            if (pts.size() >= 2) out.push_back({{pts[0], pts[1]}});
        }
    return out;
}

std::string tables_report_json(const SurfaceChart& chart, Vec2 p) {
    double c_hat[3][3][3], gamma_hat[3][3][3];
    lift_structure_functions(chart, p, c_hat);
    lift_connection(chart, p, gamma_hat);
    const RhatComponents r = lift_curvature(chart, p);
    const TableVerification v = verify_tables(chart, p);

    json out;
    out["point"] = {p.x, p.y};
    out["K"] = curvature(chart, p);

    const auto dump3 = [](const double t[3][3][3]) {
        json arr = json::array();
        for (int k = 0; k < 3; ++k) {
            json plane = json::array();
            for (int i = 0; i < 3; ++i) {
                json row = json::array();
                for (int j = 0; j < 3; ++j) row.push_back(t[k][i][j]);
                plane.push_back(row);
            }
            arr.push_back(plane);
        }
        return arr;
    };
    out["c_hat"] = dump3(c_hat);
    out["gamma_hat"] = dump3(gamma_hat);
    out["r_hat"] = {{"r1212", r.r1212}, {"r1213", r.r1213}, {"r1223", r.r1223},
                    {"r1313", r.r1313}, {"r1323", r.r1323}, {"r2323", r.r2323}};
    out["oracle_delta"] = {{"c_hat", v.max_delta_c},
                           {"gamma_hat", v.max_delta_gamma},
                           {"r_hat", v.max_delta_r}};
    return out.dump(2) + "\n";
}

std::string invariants_report_json(const FirstIntegrals& fi, const Trajectory& traj) {
    json out;
    out["kind"] = traj.kind == Trajectory::Kind::Lifted ? "lifted" : "projected";
    out["t_span"] = {traj.t_begin(), traj.t_end()};
    out["samples"] = traj.samples.size();
    if (fi.has_c1) {
        out["C1"] = fi.c1_0;
        out["C1_drift"] = fi.c1_drift;
    }
    out["C2"] = fi.c2_0;
    out["C2_drift"] = fi.c2_drift;
    out["C3sq"] = fi.c3sq_0;
    out["C3sq_drift"] = fi.c3sq_drift;
    return out.dump(2) + "\n";
}

std::string graph_csv(const std::vector<GraphSample>& graph) {
    std::string out = "u2,u1\n";
    for (const GraphSample& s : graph) {
        out += num17(s.u2);
        out += ',';
        out += num17(s.u1);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << content;
}

}  // namespace wagner
