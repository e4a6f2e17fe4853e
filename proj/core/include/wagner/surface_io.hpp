#pragma once
#include <string>

#include "wagner/surface.hpp"

namespace wagner {

/// A chart loaded from a surface-definition file, with the name kept for
/// reports and plots.
struct SurfaceHandle {
    SurfaceChart chart;
    std::string name;
};

/// Load a surface definition from JSON text. The object carries:
///   kind: "revolution" | "metric" | "embedding" | "builtin"
///   revolution: "A" (expression in v), optional "u1_period",
///               "u2_domain": [lo, hi] or "u2_period"
///   metric:     "g11", "g12", "g22" (expressions in u, v) + domains
///   embedding:  "x", "y", "z" (expressions in u, v) + domains
///   builtin:    "name", optional "params" object, optional "A" for
///               custom-profile
/// Domain keys: "u1_domain": [lo, hi], "u1_period": p (periodic),
/// likewise for u2. Throws ConfigError (or SyntaxError with byte offset
/// for bad expressions).
SurfaceHandle load_surface_json(const std::string& json_text);

/// Convenience: read the file then parse it.
SurfaceHandle load_surface_file(const std::string& path);

}  // namespace wagner
