#pragma once

#include <string>
#include <vector>

#include "mdsbiplot/mds.hpp"

namespace mdsbiplot {

/// Uniformly spaced HD axis positions {-c, -c + step, ..., c}.
struct AxisGrid {
  double c = 5.0;
  double step = 0.1;
  std::vector<double> values;

  static AxisGrid uniform(double c, double step) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("axis grid: c must be finite and >= 0");
    }
    if (!(step > 0.0) || !std::isfinite(step)) {
      throw std::invalid_argument("axis grid: step must be > 0");
    }
    const double intervals = 2.0 * c / step;
    const double rounded = std::round(intervals);
    if (std::abs(intervals - rounded) > 1e-9 * std::max(1.0, intervals)) {
      throw std::invalid_argument("axis grid: 2c/step must be an integer");
    }
    AxisGrid grid;
    grid.c = c;
    grid.step = step;
    const auto count = static_cast<std::size_t>(rounded) + 1;
    const double half = rounded / 2.0;
    grid.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      grid.values.push_back((static_cast<double>(i) - half) * step);
    }
    return grid;
  }
};

/// LD image of one attribute's HD axis.
struct AxisTrace {
  Eigen::Index attribute = 0;  // zero-based
  std::vector<double> ell;     // HD positions actually traced, ascending
  std::vector<Vector> points;  // b_hat for each ell
  std::vector<double> point_stress;
  double avg_stress = 0.0;
};

struct RemovedAxis {
  Eigen::Index attribute = 0;
  double avg_stress = 0.0;
};

struct DisplayRange {
  double lo = -2.0;
  double hi = 2.0;
};

/// An embedding plus whatever labels the method attaches to it: axis traces
/// (gmb, pca, nb) or single attribute points (dcm).
struct BiplotScene {
  std::string method = "gmb";
  Embedding embedding;
  std::vector<AxisTrace> traces;     // retained, sorted by attribute
  std::vector<RemovedAxis> removed;  // in removal order (descending G)
  Matrix attr_points;                // p x m, dcm only
  DisplayRange display;
  std::vector<std::string> ids;
  std::vector<std::string> attribute_names;
};

}  // namespace mdsbiplot
