#pragma once

//---------------------------------------------------------------------------
// Run configuration: one JSON document, schema-validated with precise field
// paths in every error.  Unknown keys are rejected (typos surface instead of
// silently falling back to defaults).
//
// Schema (defaults in brackets; fields without one are required):
//   grid:       { n, length [2*pi] }
//   physical:   { nu_s, nu_p, lambda (number or "inf"), kelvin_voigt [false] }
//   stepper:    { t_end, dt [1e-2], dt_min [1e-8], cfl_safety [0.5],
//                 adaptive [true], mollify_epsilon [0] }
//   sobolev_m:  [5]
//   ic:         { kind: single_mode | gaussian_bump | random_band,
//                 amplitude, seed [0], band_limit [1],
//                 center [[pi,pi,pi]], radius [0.5] }
//   thresholds: { linf_cap [1e6], dt_floor [1e-8], integral_cap [1e6] }
//   output:     { directory, checkpoint_every [0 = off],
//                 diagnostics_every [1] }
//
// Initial-condition families:
//   single_mode    sigma_12 = sigma_21 = amplitude * sin(band_limit * x1)
//   gaussian_bump  amplitude * exp(-|x-center|^2/radius^2) times a fixed
//                  trace-free direction tensor (compact support feeds the
//                  free-space cross-check)
//   random_band    seeded band-limited draw scaled so the H^sobolev_m norm
//                  equals amplitude
//---------------------------------------------------------------------------

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "obkm/diagnostics.hpp"
#include "obkm/evolution.hpp"
#include "obkm/grid.hpp"

namespace obkm {

// Parse/validation failure carrying the dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error("config: " + path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct GridConfig {
  int n = 0;
  double length = two_pi;
};

struct IcConfig {
  std::string kind;
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  int band_limit = 1;
  Vec3 center{pi_v, pi_v, pi_v};
  double radius = 0.5;
};

struct OutputConfig {
  std::string directory;
  int checkpoint_every = 0;  // steps; 0 disables periodic snapshots
  int diagnostics_every = 1;
};

struct RunConfig {
  GridConfig grid;
  PhysicalParams physical;
  TimeStepperConfig stepper;
  int sobolev_m = 5;
  IcConfig ic;
  BlowupThresholds thresholds;
  OutputConfig output;

  void validate() const {
    if (grid.n < 8 || (grid.n % 2) != 0) throw ConfigError("grid.n", "must be even and >= 8");
    if (!(grid.length > 0.0)) throw ConfigError("grid.length", "must be positive");
    try {
      physical.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("physical", e.what());
    }
    try {
      stepper.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("stepper", e.what());
    }
    try {
      thresholds.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("thresholds", e.what());
    }
    if (sobolev_m < 1) throw ConfigError("sobolev_m", "must be >= 1");

    if (ic.kind == "single_mode") {
      if (ic.band_limit < 1) throw ConfigError("ic.band_limit", "mode number must be >= 1");
    } else if (ic.kind == "gaussian_bump") {
      if (!(ic.radius > 0.0)) throw ConfigError("ic.radius", "must be positive");
      if (!(ic.radius < 0.5 * grid.length))
        throw ConfigError("ic.radius", "must be below half the box length");
    } else if (ic.kind == "random_band") {
      if (ic.band_limit < 1) throw ConfigError("ic.band_limit", "must be >= 1");
      if (ic.band_limit > grid.n / 3)
        throw ConfigError("ic.band_limit", "exceeds n/3 (not dealias-safe)");
      if (!(ic.amplitude > 0.0)) throw ConfigError("ic.amplitude", "must be positive");
    } else {
      throw ConfigError("ic.kind",
                        "unknown kind '" + ic.kind +
                            "' (expected single_mode, gaussian_bump, or random_band)");
    }
    if (output.directory.empty()) throw ConfigError("output.directory", "must be set");
    if (output.checkpoint_every < 0) throw ConfigError("output.checkpoint_every", "must be >= 0");
    if (output.diagnostics_every < 1) throw ConfigError("output.diagnostics_every", "must be >= 1");
  }
};

namespace detail {

using json = nlohmann::json;

inline const json& cfg_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

inline void cfg_reject_unknown(const json& j, const std::string& path,
                               const std::set<std::string>& known) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (known.find(key) == known.end())
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
  }
}

inline double cfg_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

inline int cfg_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

inline bool cfg_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

inline std::string cfg_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

inline const json* cfg_find(const json& parent, const char* key) {
  const auto it = parent.find(key);
  return it == parent.end() ? nullptr : &*it;
}

inline const json& cfg_require(const json& parent, const char* key, const std::string& path) {
  const json* p = cfg_find(parent, key);
  if (p == nullptr) throw ConfigError(path, "missing required field");
  return *p;
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& root) {
  using detail::cfg_bool;
  using detail::cfg_find;
  using detail::cfg_int;
  using detail::cfg_number;
  using detail::cfg_object;
  using detail::cfg_reject_unknown;
  using detail::cfg_require;
  using detail::cfg_string;

  cfg_object(root, "(root)");
  cfg_reject_unknown(root, "",
                     {"grid", "physical", "stepper", "sobolev_m", "ic", "thresholds", "output"});

  RunConfig cfg;

  {
    const auto& g = cfg_object(cfg_require(root, "grid", "grid"), "grid");
    cfg_reject_unknown(g, "grid", {"n", "length"});
    cfg.grid.n = cfg_int(cfg_require(g, "n", "grid.n"), "grid.n");
    if (const auto* p = cfg_find(g, "length")) cfg.grid.length = cfg_number(*p, "grid.length");
  }
  {
    const auto& p = cfg_object(cfg_require(root, "physical", "physical"), "physical");
    cfg_reject_unknown(p, "physical", {"nu_s", "nu_p", "lambda", "kelvin_voigt"});
    cfg.physical.nu_s = cfg_number(cfg_require(p, "nu_s", "physical.nu_s"), "physical.nu_s");
    cfg.physical.nu_p = cfg_number(cfg_require(p, "nu_p", "physical.nu_p"), "physical.nu_p");
    const auto& lam = cfg_require(p, "lambda", "physical.lambda");
    if (lam.is_string()) {
      if (lam.get<std::string>() != "inf")
        throw ConfigError("physical.lambda", "string value must be \"inf\"");
      cfg.physical.lambda = std::numeric_limits<double>::infinity();
    } else {
      cfg.physical.lambda = cfg_number(lam, "physical.lambda");
    }
    if (const auto* kv = cfg_find(p, "kelvin_voigt"))
      cfg.physical.kelvin_voigt = cfg_bool(*kv, "physical.kelvin_voigt");
  }
  {
    const auto& s = cfg_object(cfg_require(root, "stepper", "stepper"), "stepper");
    cfg_reject_unknown(
        s, "stepper", {"t_end", "dt", "dt_min", "cfl_safety", "adaptive", "mollify_epsilon"});
    cfg.stepper.t_end = cfg_number(cfg_require(s, "t_end", "stepper.t_end"), "stepper.t_end");
    if (const auto* p = cfg_find(s, "dt")) cfg.stepper.dt_initial = cfg_number(*p, "stepper.dt");
    if (const auto* p = cfg_find(s, "dt_min")) cfg.stepper.dt_min = cfg_number(*p, "stepper.dt_min");
    if (const auto* p = cfg_find(s, "cfl_safety"))
      cfg.stepper.cfl_safety = cfg_number(*p, "stepper.cfl_safety");
    if (const auto* p = cfg_find(s, "adaptive"))
      cfg.stepper.adaptive = cfg_bool(*p, "stepper.adaptive");
    if (const auto* p = cfg_find(s, "mollify_epsilon"))
      cfg.stepper.mollifier_eps = cfg_number(*p, "stepper.mollify_epsilon");
  }
  if (const auto* p = cfg_find(root, "sobolev_m")) cfg.sobolev_m = cfg_int(*p, "sobolev_m");
  {
    const auto& ic = cfg_object(cfg_require(root, "ic", "ic"), "ic");
    cfg_reject_unknown(ic, "ic", {"kind", "amplitude", "seed", "band_limit", "center", "radius"});
    cfg.ic.kind = cfg_string(cfg_require(ic, "kind", "ic.kind"), "ic.kind");
    cfg.ic.amplitude =
        cfg_number(cfg_require(ic, "amplitude", "ic.amplitude"), "ic.amplitude");
    if (const auto* p = cfg_find(ic, "seed")) {
      if (!p->is_number_integer() || p->get<long long>() < 0)
        throw ConfigError("ic.seed", "expected a nonnegative integer");
      cfg.ic.seed = p->get<std::uint64_t>();
    }
    if (const auto* p = cfg_find(ic, "band_limit"))
      cfg.ic.band_limit = cfg_int(*p, "ic.band_limit");
    if (const auto* p = cfg_find(ic, "center")) {
      if (!p->is_array() || p->size() != 3)
        throw ConfigError("ic.center", "expected an array of three numbers");
      for (int d = 0; d < 3; ++d)
        cfg.ic.center[d] = cfg_number((*p)[d], "ic.center[" + std::to_string(d) + "]");
    }
    if (const auto* p = cfg_find(ic, "radius")) cfg.ic.radius = cfg_number(*p, "ic.radius");
  }
  if (const auto* t = cfg_find(root, "thresholds")) {
    const auto& th = cfg_object(*t, "thresholds");
    cfg_reject_unknown(th, "thresholds", {"linf_cap", "dt_floor", "integral_cap"});
    if (const auto* p = cfg_find(th, "linf_cap"))
      cfg.thresholds.linf_cap = cfg_number(*p, "thresholds.linf_cap");
    if (const auto* p = cfg_find(th, "dt_floor"))
      cfg.thresholds.dt_floor = cfg_number(*p, "thresholds.dt_floor");
    if (const auto* p = cfg_find(th, "integral_cap"))
      cfg.thresholds.integral_cap = cfg_number(*p, "thresholds.integral_cap");
  }
  {
    const auto& o = cfg_object(cfg_require(root, "output", "output"), "output");
    cfg_reject_unknown(o, "output", {"directory", "checkpoint_every", "diagnostics_every"});
    cfg.output.directory =
        cfg_string(cfg_require(o, "directory", "output.directory"), "output.directory");
    if (const auto* p = cfg_find(o, "checkpoint_every"))
      cfg.output.checkpoint_every = cfg_int(*p, "output.checkpoint_every");
    if (const auto* p = cfg_find(o, "diagnostics_every"))
      cfg.output.diagnostics_every = cfg_int(*p, "output.diagnostics_every");
  }

  cfg.validate();
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("(file)", "cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("(file)", std::string("JSON parse error: ") + e.what());
  }
  return parse_run_config(j);
}

}  // namespace obkm
