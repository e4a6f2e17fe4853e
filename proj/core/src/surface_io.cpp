#include "wagner/surface_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wagner/catalog.hpp"

namespace wagner {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

DomainInterval domain_from(const json& obj, const std::string& coord, DomainInterval fallback) {
    const std::string period_key = coord + "_period";
    const std::string domain_key = coord + "_domain";
    if (obj.contains(period_key)) {
        const double period = obj.at(period_key).get<double>();
        if (!(period > 0.0)) throw ConfigError(period_key + " must be positive");
        double lo = 0.0;
        if (obj.contains(domain_key)) lo = obj.at(domain_key).at(0).get<double>();
        return DomainInterval::periodic_interval(lo, period);
    }
    if (obj.contains(domain_key)) {
        const auto& d = obj.at(domain_key);
        if (!d.is_array() || d.size() != 2)
            throw ConfigError(domain_key + " must be an array [lo, hi]");
        const double lo = d.at(0).get<double>(), hi = d.at(1).get<double>();
        if (!(lo < hi)) throw ConfigError(domain_key + " must satisfy lo < hi");
        return DomainInterval::open_interval(lo, hi);
    }
    return fallback;
}

Expr expr_from(const json& obj, const std::string& key) {
    if (!obj.contains(key) || !obj.at(key).is_string())
        throw ConfigError("surface definition is missing expression field \"" + key + "\"");
    return parse(obj.at(key).get<std::string>());
}

}  // namespace

SurfaceHandle load_surface_json(const std::string& json_text) {
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("surface definition is not valid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ConfigError("surface definition must be a JSON object");
    if (!obj.contains("kind")) throw ConfigError("surface definition needs a \"kind\"");
    const std::string kind = obj.at("kind").get<std::string>();

    SurfaceHandle handle;
    if (kind == "revolution") {
        RevolutionProfile profile;
        profile.A = expr_from(obj, "A");
        if (depends_on(profile.A, Var::U))
            throw ConfigError("revolution profile A must depend only on v");
        profile.u2 = domain_from(obj, "u2", DomainInterval::open_interval(-5.0, 5.0));
        profile.u1_period =
            obj.contains("u1_period") ? obj.at("u1_period").get<double>() : 2.0 * kPi;
        if (!(profile.u1_period > 0.0)) throw ConfigError("u1_period must be positive");
        handle.chart = SurfaceChart::revolution(std::move(profile));
        handle.name = "revolution";
    } else if (kind == "metric") {
        handle.chart = SurfaceChart::metric(
            expr_from(obj, "g11"), expr_from(obj, "g12"), expr_from(obj, "g22"),
            domain_from(obj, "u1", DomainInterval::whole_line()),
            domain_from(obj, "u2", DomainInterval::whole_line()));
        handle.name = "metric";
    } else if (kind == "embedding") {
        handle.chart = SurfaceChart::embedding(
            expr_from(obj, "x"), expr_from(obj, "y"), expr_from(obj, "z"),
            domain_from(obj, "u1", DomainInterval::whole_line()),
            domain_from(obj, "u2", DomainInterval::whole_line()));
        handle.name = "embedding";
    } else if (kind == "builtin") {
        if (!obj.contains("name")) throw ConfigError("builtin surface needs a \"name\"");
        const std::string name = obj.at("name").get<std::string>();
        ParamMap params;
        if (obj.contains("params")) {
            for (const auto& [k, val] : obj.at("params").items())
                params[k] = val.get<double>();
        }
        std::string expression;
        if (obj.contains("A")) expression = obj.at("A").get<std::string>();
        handle.chart = builtin(name, params, expression);
        handle.name = name;
    } else {
        throw ConfigError("unknown surface kind \"" + kind + "\"");
    }
    return handle;
}

SurfaceHandle load_surface_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open surface file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_surface_json(buf.str());
}

}  // namespace wagner
