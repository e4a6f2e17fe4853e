#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wagner/catalog.hpp"
#include "wagner/log.hpp"
#include "wagner/ode.hpp"
#include "wagner/revolution.hpp"
#include "wagner/surface_io.hpp"
#include "wagner/svg.hpp"
#include "wagner/trajectory_io.hpp"
#include "wagner/wagner_lift.hpp"

namespace {

using nlohmann::json;
using namespace wagner;

const char* numerical_error_name(const NumericalError& e) {
    if (dynamic_cast<const SingularPoint*>(&e)) return "SingularPoint";
    if (dynamic_cast<const StepUnderflow*>(&e)) return "StepUnderflow";
    if (dynamic_cast<const LeftDomain*>(&e)) return "LeftDomain";
    if (dynamic_cast<const MaxStepsExceeded*>(&e)) return "MaxStepsExceeded";
    if (dynamic_cast<const InterpolationError*>(&e)) return "InterpolationError";
    if (dynamic_cast<const TurningPoint*>(&e)) return "TurningPoint";
    if (dynamic_cast<const NonTransversal*>(&e)) return "NonTransversal";
    if (dynamic_cast<const DegenerateMetric*>(&e)) return "DegenerateMetric";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    return "NumericalError";
}

std::map<std::string, double> parse_kv(const std::string& text) {
    std::map<std::string, double> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value in \"" + item + "\"");
        const std::string key = item.substr(0, eq);
        try {
            out[key] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("bad numeric value for \"" + key + "\"");
        }
    }
    return out;
}

/// One run, fully resolved. Flags override runspec-file values override
/// defaults.
struct RunConfig {
    std::string mode;
    std::string surface_path;
    json surface_inline;  // runspec may embed the definition
    double C = 0.0;
    std::map<std::string, double> init;
    double t0 = 0.0, t1 = 10.0;
    std::string method = "rkf45";
    double abs_tol = 1e-10, rel_tol = 1e-10;
    double h_init = 1e-3, h_min = 1e-12, h_max = 0.25;
    long max_steps = 4'000'000;
    bool events = true;
    bool lifted = false;
    std::string out, svg;
    int samples = 64;
    std::optional<double> u2_span_lo, u2_span_hi;
};

/// Option set coming from flags; only set fields override.
struct RunFlags {
    std::optional<std::string> surface, init, t_span, method, out, svg, point, u2_span;
    std::optional<double> C, abs_tol, rel_tol, h_init, h_min, h_max;
    std::optional<long> max_steps;
    std::optional<int> samples;
    bool no_events = false;
    bool lifted = false;
};

void apply_runspec_json(RunConfig& cfg, const json& spec) {
    if (spec.contains("mode")) cfg.mode = spec.at("mode").get<std::string>();
    if (spec.contains("surface")) {
        if (spec.at("surface").is_string())
            cfg.surface_path = spec.at("surface").get<std::string>();
        else
            cfg.surface_inline = spec.at("surface");
    }
    if (spec.contains("C")) cfg.C = spec.at("C").get<double>();
    if (spec.contains("init"))
        for (const auto& [k, v] : spec.at("init").items()) cfg.init[k] = v.get<double>();
    if (spec.contains("t_span")) {
        cfg.t0 = spec.at("t_span").at(0).get<double>();
        cfg.t1 = spec.at("t_span").at(1).get<double>();
    }
    if (spec.contains("method")) cfg.method = spec.at("method").get<std::string>();
    if (spec.contains("abs_tol")) cfg.abs_tol = spec.at("abs_tol").get<double>();
    if (spec.contains("rel_tol")) cfg.rel_tol = spec.at("rel_tol").get<double>();
    if (spec.contains("h_init")) cfg.h_init = spec.at("h_init").get<double>();
    if (spec.contains("h_min")) cfg.h_min = spec.at("h_min").get<double>();
    if (spec.contains("h_max")) cfg.h_max = spec.at("h_max").get<double>();
    if (spec.contains("max_steps")) cfg.max_steps = spec.at("max_steps").get<long>();
    if (spec.contains("events")) cfg.events = spec.at("events").get<bool>();
    if (spec.contains("lifted")) cfg.lifted = spec.at("lifted").get<bool>();
    if (spec.contains("out")) cfg.out = spec.at("out").get<std::string>();
    if (spec.contains("svg")) cfg.svg = spec.at("svg").get<std::string>();
    if (spec.contains("samples")) cfg.samples = spec.at("samples").get<int>();
    if (spec.contains("u2_span")) {
        cfg.u2_span_lo = spec.at("u2_span").at(0).get<double>();
        cfg.u2_span_hi = spec.at("u2_span").at(1).get<double>();
    }
}

void apply_flags(RunConfig& cfg, const RunFlags& f) {
    if (f.surface) cfg.surface_path = *f.surface;
    if (f.init)
        for (const auto& [k, v] : parse_kv(*f.init)) cfg.init[k] = v;
    if (f.point)
        for (const auto& [k, v] : parse_kv(*f.point)) cfg.init[k] = v;
    if (f.t_span) {
        const auto colon = f.t_span->find(':');
        if (colon == std::string::npos) throw ConfigError("--t-span expects a:b");
        cfg.t0 = std::stod(f.t_span->substr(0, colon));
        cfg.t1 = std::stod(f.t_span->substr(colon + 1));
    }
    if (f.u2_span) {
        const auto colon = f.u2_span->find(':');
        if (colon == std::string::npos) throw ConfigError("--u2-span expects a:b");
        cfg.u2_span_lo = std::stod(f.u2_span->substr(0, colon));
        cfg.u2_span_hi = std::stod(f.u2_span->substr(colon + 1));
    }
    if (f.method) cfg.method = *f.method;
    if (f.out) cfg.out = *f.out;
    if (f.svg) cfg.svg = *f.svg;
    if (f.C) cfg.C = *f.C;
    if (f.abs_tol) cfg.abs_tol = *f.abs_tol;
    if (f.rel_tol) cfg.rel_tol = *f.rel_tol;
    if (f.h_init) cfg.h_init = *f.h_init;
    if (f.h_min) cfg.h_min = *f.h_min;
    if (f.h_max) cfg.h_max = *f.h_max;
    if (f.max_steps) cfg.max_steps = *f.max_steps;
    if (f.samples) cfg.samples = *f.samples;
    if (f.no_events) cfg.events = false;
    if (f.lifted) cfg.lifted = true;
}

SurfaceHandle load_surface(const RunConfig& cfg) {
    if (!cfg.surface_inline.is_null()) return load_surface_json(cfg.surface_inline.dump());
    if (cfg.surface_path.empty()) throw ConfigError("no surface given (--surface file.json)");
    return load_surface_file(cfg.surface_path);
}

IntegratorConfig integrator_config(const RunConfig& cfg) {
    IntegratorConfig ic;
    if (cfg.method == "rk4")
        ic.method = OdeMethod::Rk4;
    else if (cfg.method == "rkf45")
        ic.method = OdeMethod::Rkf45;
    else
        throw ConfigError("unknown method \"" + cfg.method + "\" (rk4 | rkf45)");
    ic.abs_tol = cfg.abs_tol;
    ic.rel_tol = cfg.rel_tol;
    ic.h_init = cfg.h_init;
    ic.h_min = cfg.h_min;
    ic.h_max = cfg.h_max;
    ic.t0 = cfg.t0;
    ic.t1 = cfg.t1;
    ic.max_steps = cfg.max_steps;
    ic.detect_events = cfg.events;
    return ic;
}

double init_value(const RunConfig& cfg, const std::string& key, double fallback) {
    const auto it = cfg.init.find(key);
    return it == cfg.init.end() ? fallback : it->second;
}

ProjectedState projected_init(const RunConfig& cfg) {
    ProjectedState s;
    s.u1 = init_value(cfg, "u1", 0.0);
    s.u2 = init_value(cfg, "u2", 0.0);
    const double angle = init_value(cfg, "angle", 0.0);
    const double speed = init_value(cfg, "speed", 1.0);
    s.q1 = init_value(cfg, "Q1", speed * std::cos(angle));
    s.q2 = init_value(cfg, "Q2", speed * std::sin(angle));
    s.t = cfg.t0;
    return s;
}

LiftedState lifted_init(const RunConfig& cfg, const SurfaceChart& chart) {
    const ProjectedState p = projected_init(cfg);
    LiftedState s;
    s.u1 = p.u1;
    s.u2 = p.u2;
    s.q1 = p.q1;
    s.q2 = p.q2;
    s.phi = init_value(cfg, "phi", 0.0);
    // Q3 defaults to C K(p), the geodesic family of the lift construction.
    s.q3 = init_value(cfg, "Q3", cfg.C * curvature(chart, {p.u1, p.u2}));
    s.t = cfg.t0;
    return s;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else
        write_text_file(path, content);
}

void emit_svg(const RunConfig& cfg, const SurfaceHandle& surface,
              const std::vector<Trajectory>& trajs, SvgOptions options = {}) {
    if (cfg.svg.empty()) return;
    if (surface.chart.kind() == SurfaceChart::Kind::Revolution) {
        const SingularSetInfo sigma = singular_parallels(surface.chart);
        options.sigma_parallels = sigma.roots;
    }
    write_trajectories_svg(cfg.svg, surface.chart, trajs, options);
}

int run_integrate(const RunConfig& cfg) {
    const SurfaceHandle surface = load_surface(cfg);
    const Trajectory traj =
        integrate_projected(surface.chart, projected_init(cfg), cfg.C, integrator_config(cfg));
    log(LogLevel::Info, "projected run: %ld steps, %ld rejected, %zu sigma crossings",
        traj.stats.n_steps, traj.stats.n_rejected, traj.crossings.size());
    emit(cfg.out, trajectory_csv(traj, surface.chart));
    emit_svg(cfg, surface, {traj});
    return 0;
}

int run_lift(const RunConfig& cfg) {
    const SurfaceHandle surface = load_surface(cfg);
    const Trajectory traj =
        integrate_lifted(surface.chart, lifted_init(cfg, surface.chart), integrator_config(cfg));
    if (traj.termination == Termination::SingularApproach)
        log(LogLevel::Warn, "lifted run truncated at t = %g: approached the singular set",
            traj.t_end());
    emit(cfg.out, trajectory_csv(traj, surface.chart));
    emit_svg(cfg, surface, {traj});
    return 0;
}

int run_lift_solution(const RunConfig& cfg) {
    const SurfaceHandle surface = load_surface(cfg);
    const Trajectory gamma =
        integrate_projected(surface.chart, projected_init(cfg), cfg.C, integrator_config(cfg));
    const Trajectory lifted =
        lift_solution(surface.chart, gamma, init_value(cfg, "phi", 0.0), cfg.C);
    emit(cfg.out, trajectory_csv(lifted, surface.chart));
    emit_svg(cfg, surface, {lifted});
    return 0;
}

int run_invariants(const RunConfig& cfg) {
    const SurfaceHandle surface = load_surface(cfg);
    Trajectory traj;
    if (cfg.lifted)
        traj = integrate_lifted(surface.chart, lifted_init(cfg, surface.chart),
                                integrator_config(cfg));
    else
        traj = integrate_projected(surface.chart, projected_init(cfg), cfg.C,
                                   integrator_config(cfg));
    const FirstIntegrals fi = first_integrals(traj, surface.chart, cfg.C);
    emit(cfg.out, invariants_report_json(fi, traj));
    return 0;
}

int run_region(const RunConfig& cfg) {
    if (cfg.C == 0.0) throw ConfigError("region requires C != 0");
    const SurfaceHandle surface = load_surface(cfg);
    const ProjectedState init = projected_init(cfg);

    SvgOptions options;
    double k_max = 0.0;
    std::vector<RegionBand> bands;
    if (surface.chart.kind() == SurfaceChart::Kind::Revolution) {
        const ForbiddenRegion region = forbidden_region(surface.chart, init, cfg.C);
        k_max = region.K_max;
        bands = region.bands;
        options.bands = bands;
    } else {
        const double k0 = curvature(surface.chart, {init.u1, init.u2});
        k_max = std::sqrt(init.q1 * init.q1 + init.q2 * init.q2 + cfg.C * cfg.C * k0 * k0) /
                std::abs(cfg.C);
        options.contours = curvature_contour(surface.chart, k_max);
    }
    emit(cfg.out, region_report_json(k_max, bands, options.contours));

    if (!cfg.svg.empty()) {
        const Trajectory traj =
            integrate_projected(surface.chart, init, cfg.C, integrator_config(cfg));
        emit_svg(cfg, surface, {traj}, options);
    }
    return 0;
}

int run_quadrature(const RunConfig& cfg) {
    const SurfaceHandle surface = load_surface(cfg);
    if (surface.chart.kind() != SurfaceChart::Kind::Revolution)
        throw ConfigError("quadrature requires a revolution surface");
    const ProjectedState init = projected_init(cfg);

    const Jet3 a = surface.chart.profile()->jet(init.u2);
    const double k0 = -a.d2 / a.value;
    const double c2 = a.value * init.q1 - cfg.C * a.d1;
    const double c3sq = init.q1 * init.q1 + init.q2 * init.q2 + cfg.C * cfg.C * k0 * k0;

    double lo, hi;
    if (cfg.u2_span_lo && cfg.u2_span_hi) {
        lo = *cfg.u2_span_lo;
        hi = *cfg.u2_span_hi;
    } else {
        const RegionBand span = transversal_span(surface.chart, cfg.C, c2, c3sq, init.u2);
        const double margin = 1e-3 * (span.hi - span.lo);
        lo = span.lo + margin;
        hi = span.hi - margin;
    }
    const auto graph = graph_quadrature(surface.chart, cfg.C, c2, c3sq, lo, hi, init.u2,
                                        init.u1, cfg.samples);
    emit(cfg.out, graph_csv(graph));
    return 0;
}

int run_tables(const RunConfig& cfg) {
    const SurfaceHandle surface = load_surface(cfg);
    const Vec2 p{init_value(cfg, "u1", 0.0), init_value(cfg, "u2", 0.0)};
    emit(cfg.out, tables_report_json(surface.chart, p));
    return 0;
}

/// Re-read trajectory CSVs and overlay them in one SVG. Wrapped periodic
/// coordinates are unwrapped for display by minimal jumps.
Trajectory trajectory_from_csv(const std::string& path, const SurfaceChart& chart) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trajectory csv: " + path);
    Trajectory traj;
    std::string line;
    std::getline(in, line);  // header
    double last_u1 = 0.0, last_u2 = 0.0;
    bool first = true;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string item;
        std::vector<std::string> f;
        while (std::getline(ss, item, ',')) f.push_back(item);
        if (f.size() < 3) continue;
        TrajectorySample s;
        s.t = std::stod(f[0]);
        double u1 = std::stod(f[1]), u2 = std::stod(f[2]);
        const auto unwrap = [](double x, double prev, const DomainInterval& dom) {
            if (!dom.periodic) return x;
            while (x - prev > 0.5 * dom.period) x -= dom.period;
            while (prev - x > 0.5 * dom.period) x += dom.period;
            return x;
        };
        if (!first) {
            u1 = unwrap(u1, last_u1, chart.u1_domain());
            u2 = unwrap(u2, last_u2, chart.u2_domain());
        }
        first = false;
        last_u1 = u1;
        last_u2 = u2;
        s.y = {u1, u2, 0.0, 0.0, 0.0, 0.0};
        traj.samples.push_back(s);
    }
    if (traj.samples.empty()) throw ConfigError("trajectory csv has no rows: " + path);
    return traj;
}

int run_plot(const RunConfig& cfg, const std::vector<std::string>& csvs) {
    if (cfg.svg.empty()) throw ConfigError("plot needs --svg");
    const SurfaceHandle surface = load_surface(cfg);
    std::vector<Trajectory> trajs;
    for (const std::string& path : csvs)
        trajs.push_back(trajectory_from_csv(path, surface.chart));
    SvgOptions options;
    if (surface.chart.kind() == SurfaceChart::Kind::Revolution)
        options.sigma_parallels = singular_parallels(surface.chart).roots;
    write_trajectories_svg(cfg.svg, surface.chart, trajs, options);
    return 0;
}

int run_one(const RunConfig& cfg);

int run_batch(const std::string& path, int jobs, const RunFlags& flags) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open runspec list: " + path);
    json list = json::parse(in, nullptr, false);
    if (list.is_discarded() || !list.is_array())
        throw ConfigError("batch input must be a JSON array of runspecs");

    std::vector<RunConfig> runs;
    for (const json& spec : list) {
        RunConfig cfg;
        apply_runspec_json(cfg, spec);
        apply_flags(cfg, flags);
        if (cfg.mode.empty()) throw ConfigError("each batch runspec needs a \"mode\"");
        if (cfg.out.empty() && cfg.svg.empty())
            throw ConfigError("batch runspecs must write to files (set \"out\" or \"svg\")");
        runs.push_back(std::move(cfg));
    }

    std::vector<int> results(runs.size(), 0);
    std::atomic<std::size_t> next{0};
    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(runs.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < runs.size(); i = next.fetch_add(1)) {
                try {
                    results[i] = run_one(runs[i]);
                } catch (const ConfigError& e) {
                    log(LogLevel::Error, "run %zu: %s", i, e.what());
                    results[i] = 1;
                } catch (const NumericalError& e) {
                    log(LogLevel::Error, "run %zu (%s): %s", i, numerical_error_name(e),
                        e.what());
                    results[i] = 2;
                } catch (const std::exception& e) {
                    log(LogLevel::Error, "run %zu: %s", i, e.what());
                    results[i] = 1;
                }
            }
        });
    for (std::thread& t : pool) t.join();
    int worst = 0;
    for (int r : results) worst = std::max(worst, r);
    return worst;
}

int run_one(const RunConfig& cfg) {
    if (cfg.mode == "project" || cfg.mode == "integrate") return run_integrate(cfg);
    if (cfg.mode == "lift") return run_lift(cfg);
    if (cfg.mode == "lift-solution") return run_lift_solution(cfg);
    if (cfg.mode == "invariants") return run_invariants(cfg);
    if (cfg.mode == "region") return run_region(cfg);
    if (cfg.mode == "quadrature") return run_quadrature(cfg);
    if (cfg.mode == "tables") return run_tables(cfg);
    throw ConfigError("unknown mode \"" + cfg.mode + "\"");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lifted-metric geodesics on surfaces: integrate the projected and lifted "
                 "systems, verify conservation laws, and reproduce the figure recipes."};
    app.require_subcommand(1);

    RunFlags flags;
    std::string runspec_path, batch_path;
    int jobs = 1;

    const auto add_common = [&](CLI::App* sub, bool with_integrator = true) {
        sub->add_option("--surface", flags.surface, "surface definition JSON file");
        sub->add_option("--runspec", runspec_path, "runspec JSON file (flags override)");
        sub->add_option("--out", flags.out, "output file (default stdout)");
        if (with_integrator) {
            sub->add_option("--C", flags.C, "constant C of the projected equation");
            sub->add_option("--init", flags.init,
                            "initial state, e.g. u1=0,u2=0.3,angle=0.4,speed=1");
            sub->add_option("--t-span", flags.t_span, "integration span a:b");
            sub->add_option("--method", flags.method, "rk4 | rkf45");
            sub->add_option("--abs-tol", flags.abs_tol, "absolute tolerance");
            sub->add_option("--rel-tol", flags.rel_tol, "relative tolerance");
            sub->add_option("--h-init", flags.h_init, "initial step (rk4: fixed step)");
            sub->add_option("--h-min", flags.h_min, "minimum step");
            sub->add_option("--h-max", flags.h_max, "maximum step");
            sub->add_option("--max-steps", flags.max_steps, "step budget");
            sub->add_flag("--no-events", flags.no_events, "skip sigma-crossing detection");
            sub->add_option("--svg", flags.svg, "also render an SVG plot");
        }
    };

    CLI::App* c_int = app.add_subcommand("integrate", "integrate the projected equation");
    add_common(c_int);
    CLI::App* c_lift = app.add_subcommand("lift", "integrate the lifted geodesic system");
    add_common(c_lift);
    CLI::App* c_ls = app.add_subcommand(
        "lift-solution", "integrate the projected equation and lift it through a fiber point");
    add_common(c_ls);
    CLI::App* c_inv =
        app.add_subcommand("invariants", "report first-integral drift along a run");
    add_common(c_inv);
    c_inv->add_flag("--lifted", flags.lifted, "integrate the lifted system instead");
    CLI::App* c_reg = app.add_subcommand("region", "forbidden-region report for C != 0");
    add_common(c_reg);
    CLI::App* c_quad =
        app.add_subcommand("quadrature", "trajectory graph u1(u2) by quadrature");
    add_common(c_quad);
    c_quad->add_option("--samples", flags.samples, "number of graph samples");
    c_quad->add_option("--u2-span", flags.u2_span, "quadrature span a:b (default: maximal)");
    CLI::App* c_tab = app.add_subcommand("tables", "lifted-frame tables and oracle deltas");
    add_common(c_tab, false);
    c_tab->add_option("--point", flags.point, "evaluation point u1=..,u2=..");
    CLI::App* c_batch = app.add_subcommand("batch", "run a list of runspecs");
    c_batch->add_option("specs", batch_path, "JSON array of runspec objects")->required();
    c_batch->add_option("--jobs", jobs, "concurrent runs");
    CLI::App* c_plot = app.add_subcommand("plot", "overlay trajectory CSVs in one SVG");
    std::vector<std::string> plot_csvs;
    c_plot->add_option("--surface", flags.surface, "surface definition JSON file");
    c_plot->add_option("--svg", flags.svg, "output SVG")->required();
    c_plot->add_option("csvs", plot_csvs, "trajectory CSV files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (c_batch->parsed()) return run_batch(batch_path, jobs, flags);
        if (c_plot->parsed()) {
            RunConfig cfg;
            apply_flags(cfg, flags);
            return run_plot(cfg, plot_csvs);
        }

        RunConfig cfg;
        if (c_int->parsed()) cfg.mode = "integrate";
        if (c_lift->parsed()) cfg.mode = "lift";
        if (c_ls->parsed()) cfg.mode = "lift-solution";
        if (c_inv->parsed()) cfg.mode = "invariants";
        if (c_reg->parsed()) cfg.mode = "region";
        if (c_quad->parsed()) cfg.mode = "quadrature";
        if (c_tab->parsed()) cfg.mode = "tables";

        if (!runspec_path.empty()) {
            std::ifstream in(runspec_path, std::ios::binary);
            if (!in) throw ConfigError("cannot open runspec: " + runspec_path);
            json spec = json::parse(in, nullptr, false);
            if (spec.is_discarded()) throw ConfigError("runspec is not valid JSON");
            const std::string mode = cfg.mode;
            apply_runspec_json(cfg, spec);
            if (!mode.empty()) cfg.mode = mode;  // the subcommand wins
        }
        apply_flags(cfg, flags);
        return run_one(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure (" << numerical_error_name(e) << "): " << e.what()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        // malformed runspec values and the like
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
