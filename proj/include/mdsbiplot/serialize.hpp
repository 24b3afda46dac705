#pragma once

// JSON and CSV output. Attribute indices are written 1-based as `k`.

#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdsbiplot/mds.hpp"
#include "mdsbiplot/scene.hpp"

namespace mdsbiplot {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json rows_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string attribute_name(const BiplotScene& s, Eigen::Index k) {
  if (k >= 0 && static_cast<std::size_t>(k) < s.attribute_names.size()) {
    return s.attribute_names[static_cast<std::size_t>(k)];
  }
  return "V" + std::to_string(k + 1);
}

}  // namespace detail

inline Json embedding_json(const Embedding& e) {
  Json j;
  j["n"] = e.n();
  j["m"] = e.m();
  j["kind_hd"] = to_string(e.kind_hd);
  j["kind_ld"] = to_string(e.kind_ld);
  j["stress"] = e.final_stress;
  j["seed"] = e.seed;
  j["iterations"] = e.iterations;
  j["converged"] = e.converged;
  j["coordinates"] = detail::rows_json(e.Z);
  return j;
}

/// One row per observation, id first; values printed to round-trip precision.
inline std::string embedding_csv(const Embedding& e, const std::vector<std::string>& ids) {
  std::string out = "id";
  for (Eigen::Index j = 0; j < e.m(); ++j) out += ",z" + std::to_string(j + 1);
  out += '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < e.n(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    std::string id = idx < ids.size() ? ids[idx] : std::to_string(i + 1);
    if (id.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : id) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      id = quoted + "\"";
    }
    out += id;
    for (Eigen::Index j = 0; j < e.m(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", e.Z(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline Json scene_json(const BiplotScene& s) {
  Json j;
  j["method"] = s.method;
  j["embedding"] = embedding_json(s.embedding);
  j["ids"] = s.ids;
  Json axes = Json::array();
  for (const AxisTrace& t : s.traces) {
    Json a;
    a["k"] = t.attribute + 1;
    a["name"] = detail::attribute_name(s, t.attribute);
    a["ell"] = t.ell;
    Json pts = Json::array();
    for (const Vector& p : t.points) {
      pts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
    }
    a["points"] = std::move(pts);
    a["g"] = t.point_stress;
    a["G"] = t.avg_stress;
    axes.push_back(std::move(a));
  }
  j["axes"] = std::move(axes);
  Json removed = Json::array();
  for (const RemovedAxis& r : s.removed) {
    removed.push_back({{"k", r.attribute + 1},
                       {"name", detail::attribute_name(s, r.attribute)},
                       {"G", r.avg_stress}});
  }
  j["removed"] = std::move(removed);
  if (s.attr_points.size() > 0) {
    Json attrs = Json::array();
    for (Eigen::Index k = 0; k < s.attr_points.rows(); ++k) {
      Json pt = Json::array();
      for (Eigen::Index c = 0; c < s.attr_points.cols(); ++c) pt.push_back(s.attr_points(k, c));
      attrs.push_back(
          {{"k", k + 1}, {"name", detail::attribute_name(s, k)}, {"point", std::move(pt)}});
    }
    j["attr_points"] = std::move(attrs);
  }
  j["display_range"] = {s.display.lo, s.display.hi};
  return j;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mdsbiplot
