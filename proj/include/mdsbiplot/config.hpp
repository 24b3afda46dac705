#pragma once

// Run configuration. Files are flat `key = value` text, one pair per line,
// '#' starts a comment. Command-line flags are applied on top.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "mdsbiplot/dataset.hpp"
#include "mdsbiplot/dissimilarity.hpp"
#include "mdsbiplot/gmb.hpp"
#include "mdsbiplot/mds.hpp"
#include "mdsbiplot/numerics.hpp"
#include "mdsbiplot/scene.hpp"

namespace mdsbiplot {

enum class Method { gmb, pca, nb, dcm };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::gmb: return "gmb";
    case Method::pca: return "pca";
    case Method::nb: return "nb";
    case Method::dcm: return "dcm";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "gmb") return Method::gmb;
  if (s == "pca") return Method::pca;
  if (s == "nb") return Method::nb;
  if (s == "dcm") return Method::dcm;
  throw std::invalid_argument("unknown method '" + s + "' (expected gmb, pca, nb or dcm)");
}

/// Scene tag written to JSON.
inline std::string scene_tag(Method m) {
  switch (m) {
    case Method::gmb: return "gmb";
    case Method::pca: return "pca_biplot";
    case Method::nb: return "nonlinear_biplot";
    case Method::dcm: return "dcm";
  }
  return "?";
}

struct RunConfig {
  std::string input;
  bool has_header = true;
  std::optional<std::string> id_column;

  Method method = Method::gmb;
  Dissimilarity kind_hd = Dissimilarity::euclidean;
  Dissimilarity kind_ld = Dissimilarity::euclidean;
  Eigen::Index m = 2;
  double grid_c = 5.0;
  double grid_step = 0.1;
  DisplayRange display;
  std::optional<ScaleMode> scale;  // unset: zscore, or unit_interval for dcm
  FitOptions fit;
  std::uint64_t seed = 0;
  int axis_restarts = 0;
  std::optional<Eigen::Index> keep;
  std::optional<double> threshold;
  unsigned threads = 1;
  std::string out = ".";

  ScaleMode effective_scale() const {
    if (method == Method::dcm) return ScaleMode::unit_interval;
    return scale.value_or(ScaleMode::zscore);
  }
  AxisGrid grid() const { return AxisGrid::uniform(grid_c, grid_step); }
  FitOptions fit_options() const {
    FitOptions o = fit;
    o.seed = seed;
    return o;
  }
  AxisSolveOptions axis_options() const {
    AxisSolveOptions o;
    o.restarts = axis_restarts;
    o.seed = seed;
    return o;
  }

  /// Throws std::invalid_argument for anything that cannot run.
  void validate() const;
};

/// Method / HD metric compatibility. Empty when the pair is supported.
inline std::string method_metric_diagnostic(Method method, Dissimilarity kind_hd,
                                            Dissimilarity kind_ld) {
  switch (method) {
    case Method::nb:
      if (!euclidean_embeddable(kind_hd)) {
        return "method nb with hd=" + to_string(kind_hd) +
               " is N/A: nonlinear biplot requires Euclidean embeddable dissimilarity "
               "(supported: euclidean, sqrt_manhattan, clark)";
      }
      if (kind_ld != Dissimilarity::euclidean) {
        return "method nb places points by classical MDS, so ld must be euclidean";
      }
      return {};
    case Method::pca:
      if (kind_ld != Dissimilarity::euclidean) {
        return "method pca is a linear projection, so ld must be euclidean";
      }
      return {};
    case Method::dcm:
      if (kind_hd == Dissimilarity::inner_product) {
        return "method dcm needs a distance-like hd dissimilarity, not inner_product";
      }
      return {};
    case Method::gmb:
      return {};
  }
  return {};
}

inline void RunConfig::validate() const {
  if (const std::string d = method_metric_diagnostic(method, kind_hd, kind_ld); !d.empty()) {
    throw std::invalid_argument(d);
  }
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  (void)grid();
  if (!(display.lo < display.hi)) {
    throw std::invalid_argument("display range must satisfy lo < hi");
  }
  fit.validate();
  if (keep && threshold) throw std::invalid_argument("give at most one of keep and threshold");
  if (keep && *keep < 0) throw std::invalid_argument("keep must be >= 0");
  if (axis_restarts < 0) throw std::invalid_argument("axis_restarts must be >= 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

namespace detail {

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: " + key + " expects true/false, got '" + v + "'");
}

template <class T>
T parse_scalar(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw std::invalid_argument("config: bad value '" + v + "' for " + key);
  }
  return out;
}

inline DisplayRange parse_display_range(const std::string& v) {
  const auto comma = v.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument("display range must be 'lo,hi', got '" + v + "'");
  }
  return {parse_scalar<double>("display_range", trim(v.substr(0, comma))),
          parse_scalar<double>("display_range", trim(v.substr(comma + 1)))};
}

}  // namespace detail

/// Apply one key=value setting. Unknown keys are errors.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_scalar;
  if (key == "input") cfg.input = value;
  else if (key == "has_header") cfg.has_header = detail::parse_bool(key, value);
  else if (key == "id_column") cfg.id_column = value;
  else if (key == "method") cfg.method = parse_method(value);
  else if (key == "kind_hd" || key == "hd") cfg.kind_hd = parse_dissimilarity(value);
  else if (key == "kind_ld" || key == "ld") cfg.kind_ld = parse_dissimilarity(value);
  else if (key == "m") cfg.m = parse_scalar<Eigen::Index>(key, value);
  else if (key == "grid_c") cfg.grid_c = parse_scalar<double>(key, value);
  else if (key == "grid_step") cfg.grid_step = parse_scalar<double>(key, value);
  else if (key == "display_range") cfg.display = detail::parse_display_range(value);
  else if (key == "scale") cfg.scale = parse_scale_mode(value);
  else if (key == "max_iterations") cfg.fit.max_iterations = parse_scalar<int>(key, value);
  else if (key == "tolerance") cfg.fit.tolerance = parse_scalar<double>(key, value);
  else if (key == "step_rule") cfg.fit.step_rule = parse_step_rule(value);
  else if (key == "fixed_step") cfg.fit.fixed_step = parse_scalar<double>(key, value);
  else if (key == "restarts") cfg.fit.restarts = parse_scalar<int>(key, value);
  else if (key == "init") cfg.fit.init = parse_init_mode(value);
  else if (key == "seed") cfg.seed = parse_scalar<std::uint64_t>(key, value);
  else if (key == "axis_restarts") cfg.axis_restarts = parse_scalar<int>(key, value);
  else if (key == "keep") cfg.keep = parse_scalar<Eigen::Index>(key, value);
  else if (key == "threshold") cfg.threshold = parse_scalar<double>(key, value);
  else if (key == "threads") cfg.threads = parse_scalar<unsigned>(key, value);
  else if (key == "out") cfg.out = value;
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline void parse_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      apply_setting(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  parse_config_text(cfg, buf.str());
}

}  // namespace mdsbiplot
