#include "wagner/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace wagner {

namespace {

const char* kPalette[] = {"#1f6fb2", "#d1495b", "#3c8d53", "#8a5fb0",
                          "#c98a2b", "#3aa6a6", "#6b6b6b", "#b05fa3"};

struct Box {
    double xlo = std::numeric_limits<double>::infinity();
    double xhi = -std::numeric_limits<double>::infinity();
    double ylo = std::numeric_limits<double>::infinity();
    double yhi = -std::numeric_limits<double>::infinity();

    void add(double x, double y) {
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
    }
    void pad(double f) {
        const double dx = std::max(1e-9, xhi - xlo), dy = std::max(1e-9, yhi - ylo);
        xlo -= f * dx;
        xhi += f * dx;
        ylo -= f * dy;
        yhi += f * dy;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

/// Fixed orthographic projection for the 3D panel.
Vec2 project3(Vec3 p) {
    const double c = 0.35;
    return {p.x - c * p.y, -p.z + 0.5 * c * p.y};
}

class Panel {
public:
    Panel(double x_off, double width, double height, Box box)
        : x_off_(x_off), w_(width), h_(height), box_(box) {}

    Vec2 map(double x, double y) const {
        const double sx = w_ / (box_.xhi - box_.xlo);
        const double sy = h_ / (box_.yhi - box_.ylo);
        const double s = std::min(sx, sy);
        const double cx = 0.5 * (box_.xlo + box_.xhi), cy = 0.5 * (box_.ylo + box_.yhi);
        return {x_off_ + 0.5 * w_ + s * (x - cx), 0.5 * h_ - s * (y - cy)};
    }

    void polyline(std::string& out, const std::vector<Vec2>& pts, const std::string& style) const {
        if (pts.size() < 2) return;
        out += "<polyline fill=\"none\" " + style + " points=\"";
        for (const Vec2& p : pts) {
            const Vec2 q = map(p.x, p.y);
            out += fmt(q.x) + "," + fmt(q.y) + " ";
        }
        out += "\"/>\n";
    }

private:
    double x_off_, w_, h_;
    Box box_;
};

std::vector<Vec2> resample_uv(const Trajectory& t, int max_points) {
    std::vector<Vec2> pts;
    const int stride = std::max<int>(1, static_cast<int>(t.samples.size()) / max_points);
    for (std::size_t i = 0; i < t.samples.size(); i += stride)
        pts.push_back({t.samples[i].y[0], t.samples[i].y[1]});
    pts.push_back({t.samples.back().y[0], t.samples.back().y[1]});
    return pts;
}

}  // namespace

std::string trajectories_svg(const SurfaceChart& chart, const std::vector<Trajectory>& trajs,
                             const SvgOptions& options) {
    const bool with_3d = chart.has_embedding();
    const double panel_w = 460.0, panel_h = 420.0, gap = 30.0;
    const double width = with_3d ? 2.0 * panel_w + gap : panel_w;

    Box dev;
    for (const Trajectory& t : trajs)
        for (const Vec2& p : resample_uv(t, options.max_points)) dev.add(p.x, p.y);
    for (const ContourPolyline& c : options.contours)
        for (const Vec2& p : c.points) dev.add(p.x, p.y);
    if (trajs.empty()) dev.add(0, 0);
    dev.pad(0.08);
    Panel left(0.0, panel_w, panel_h, dev);

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
           fmt(panel_h) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(panel_h) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // region bands shaded across the full u1 extent
    for (const RegionBand& b : options.bands) {
        const Vec2 a = left.map(dev.xlo, b.hi), c = left.map(dev.xhi, b.lo);
        out += "<rect x=\"" + fmt(a.x) + "\" y=\"" + fmt(a.y) + "\" width=\"" +
               fmt(c.x - a.x) + "\" height=\"" + fmt(c.y - a.y) +
               "\" fill=\"#d9d9d9\" fill-opacity=\"0.6\"/>\n";
    }
    for (double v : options.sigma_parallels)
        left.polyline(out, {{dev.xlo, v}, {dev.xhi, v}},
                      "stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"6,4\"");
    for (const ContourPolyline& c : options.contours)
        left.polyline(out, c.points, "stroke=\"#888888\" stroke-width=\"2.2\"");

    int color = 0;
    for (const Trajectory& t : trajs) {
        const std::string style = std::string("stroke=\"") + kPalette[color % 8] +
                                  "\" stroke-width=\"1.4\"";
        left.polyline(out, resample_uv(t, options.max_points), style);
        ++color;
    }

    if (with_3d) {
        Box b3;
        std::vector<std::vector<Vec2>> wires;
        const DomainInterval& du = chart.u1_domain();
        const DomainInterval& dv = chart.u2_domain();
        const double ulo = std::isfinite(du.lo) ? du.lo : -5.0;
        const double uhi = std::isfinite(du.hi) ? du.hi : 5.0;
        const double vlo = std::isfinite(dv.lo) ? dv.lo : -5.0;
        const double vhi = std::isfinite(dv.hi) ? dv.hi : 5.0;
        const int nw = 13, ns = 64;
        for (int i = 0; i < nw; ++i) {
            std::vector<Vec2> meridian, parallel;
            for (int j = 0; j <= ns; ++j) {
                const Vec2 pm{ulo + (uhi - ulo) * i / (nw - 1.0),
                              vlo + (vhi - vlo) * j / static_cast<double>(ns)};
                const Vec2 pp{ulo + (uhi - ulo) * j / static_cast<double>(ns),
                              vlo + (vhi - vlo) * i / (nw - 1.0)};
                const Vec2 m = project3(chart.embed_point(pm));
                const Vec2 q = project3(chart.embed_point(pp));
                meridian.push_back(m);
                parallel.push_back(q);
                b3.add(m.x, m.y);
                b3.add(q.x, q.y);
            }
            wires.push_back(meridian);
            wires.push_back(parallel);
        }

        std::vector<std::vector<Vec2>> curves3;
        for (const Trajectory& t : trajs) {
            std::vector<Vec2> c3;
            for (const Vec2& p : resample_uv(t, options.max_points)) {
                const Vec2 q = project3(chart.embed_point(p));
                c3.push_back(q);
                b3.add(q.x, q.y);
            }
            curves3.push_back(std::move(c3));
        }
        b3.pad(0.08);
        Panel right(panel_w + gap, panel_w, panel_h, b3);
        for (const auto& w : wires)
            right.polyline(out, w, "stroke=\"#cccccc\" stroke-width=\"0.6\"");
        color = 0;
        for (const auto& c3 : curves3) {
            const std::string style = std::string("stroke=\"") + kPalette[color % 8] +
                                      "\" stroke-width=\"1.4\"";
            right.polyline(out, c3, style);
            ++color;
        }
    }

    out += "</svg>\n";
    return out;
}

void write_trajectories_svg(const std::string& path, const SurfaceChart& chart,
                            const std::vector<Trajectory>& trajs, const SvgOptions& options) {
    write_text_file(path, trajectories_svg(chart, trajs, options));
}

}  // namespace wagner
