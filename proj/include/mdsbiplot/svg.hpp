#pragma once

// Static SVG rendering of a biplot scene. Output depends only on the scene,
// so equal scenes give equal bytes.

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "mdsbiplot/scene.hpp"

namespace mdsbiplot {

namespace detail {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 first_two(const Eigen::Ref<const Vector>& v) {
  return {v.size() > 0 ? v(0) : 0.0, v.size() > 1 ? v(1) : 0.0};
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

/// Trace points with ell inside [lo, hi]; ends interpolated onto lo and hi
/// when the range falls between grid values.
inline std::vector<Point2> clip_trace(const AxisTrace& t, const DisplayRange& r) {
  std::vector<Point2> out;
  const std::size_t n = t.ell.size();
  auto at = [&](std::size_t i) { return first_two(t.points[i]); };
  auto lerp = [&](std::size_t i, double ell) {
    const double w = (ell - t.ell[i]) / (t.ell[i + 1] - t.ell[i]);
    const Point2 a = at(i), b = at(i + 1);
    return Point2{a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)};
  };
  for (std::size_t i = 0; i < n; ++i) {
    const bool inside = t.ell[i] >= r.lo && t.ell[i] <= r.hi;
    if (i + 1 < n && t.ell[i] < r.lo && t.ell[i + 1] > r.lo) out.push_back(lerp(i, r.lo));
    if (inside) out.push_back(at(i));
    if (i + 1 < n && t.ell[i] < r.hi && t.ell[i + 1] > r.hi) out.push_back(lerp(i, r.hi));
  }
  return out;
}

inline bool collapsed(const std::vector<Point2>& pts) {
  for (const auto& a : pts) {
    for (const auto& b : pts) {
      if (std::hypot(a.x - b.x, a.y - b.y) >= 1e-5) return false;
    }
  }
  return true;
}

}  // namespace detail

inline std::string render_svg(const BiplotScene& scene) {
  using detail::fmt;
  using detail::Point2;
  constexpr double kSize = 800.0;
  constexpr double kMargin = 0.1 * kSize;

  struct Axis {
    std::string name;
    std::vector<Point2> pts;
    bool single;
  };
  auto name_of_attr = [&](Eigen::Index k) {
    const auto idx = static_cast<std::size_t>(k);
    return idx < scene.attribute_names.size() ? scene.attribute_names[idx]
                                              : "V" + std::to_string(k + 1);
  };

  std::vector<Point2> obs;
  for (Eigen::Index i = 0; i < scene.embedding.Z.rows(); ++i) {
    obs.push_back(detail::first_two(scene.embedding.Z.row(i).transpose()));
  }
  std::vector<Axis> axes;
  for (const AxisTrace& t : scene.traces) {
    std::vector<Point2> pts = detail::clip_trace(t, scene.display);
    if (pts.empty()) continue;
    const bool single = detail::collapsed(pts);
    if (single) pts.resize(1);
    axes.push_back({name_of_attr(t.attribute), std::move(pts), single});
  }
  std::vector<std::pair<std::string, Point2>> attrs;
  for (Eigen::Index k = 0; k < scene.attr_points.rows(); ++k) {
    attrs.emplace_back(name_of_attr(k), detail::first_two(scene.attr_points.row(k).transpose()));
  }

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto grow = [&](const Point2& p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return;
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  };
  for (const auto& p : obs) grow(p);
  for (const auto& a : axes) for (const auto& p : a.pts) grow(p);
  for (const auto& a : attrs) grow(a.second);
  if (!(xmin <= xmax)) xmin = xmax = ymin = ymax = 0.0;
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double scale = (kSize - 2.0 * kMargin) / span;
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  auto px = [&](double x) { return fmt("%.2f", kSize / 2.0 + (x - cx) * scale); };
  auto py = [&](double y) { return fmt("%.2f", kSize / 2.0 - (y - cy) * scale); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"800\" "
       "viewBox=\"0 0 800 800\">\n";
  s += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"8\" "
       "markerHeight=\"8\" orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\" "
       "fill=\"#b03030\"/></marker></defs>\n";
  s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"white\"/>\n";
  s += "<text x=\"12\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">" +
       detail::xml_escape(scene.method) + "</text>\n";

  for (const Axis& a : axes) {
    const Point2& end = a.pts.back();
    if (a.single) {
      s += "<rect x=\"" + fmt("%.2f", kSize / 2.0 + (end.x - cx) * scale - 4.0) + "\" y=\"" +
           fmt("%.2f", kSize / 2.0 - (end.y - cy) * scale - 4.0) +
           "\" width=\"8\" height=\"8\" fill=\"#b03030\"/>\n";
    } else {
      s += "<polyline fill=\"none\" stroke=\"#b03030\" stroke-width=\"1.5\" "
           "marker-end=\"url(#arrow)\" points=\"";
      for (std::size_t i = 0; i < a.pts.size(); ++i) {
        if (i) s += ' ';
        s += px(a.pts[i].x) + "," + py(a.pts[i].y);
      }
      s += "\"/>\n";
    }
    s += "<text x=\"" + px(end.x) + "\" y=\"" + py(end.y) +
         "\" dx=\"6\" dy=\"-6\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#b03030\">" +
         detail::xml_escape(a.name) + "</text>\n";
  }
  for (const auto& [name, p] : attrs) {
    const double x = kSize / 2.0 + (p.x - cx) * scale;
    const double y = kSize / 2.0 - (p.y - cy) * scale;
    s += "<path d=\"M" + fmt("%.2f", x) + "," + fmt("%.2f", y - 6.0) + " L" + fmt("%.2f", x + 6.0) +
         "," + fmt("%.2f", y) + " L" + fmt("%.2f", x) + "," + fmt("%.2f", y + 6.0) + " L" +
         fmt("%.2f", x - 6.0) + "," + fmt("%.2f", y) + " z\" fill=\"#2060b0\"/>\n";
    s += "<text x=\"" + px(p.x) + "\" y=\"" + py(p.y) +
         "\" dx=\"8\" dy=\"-8\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#2060b0\">" +
         detail::xml_escape(name) + "</text>\n";
  }
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string label = i < scene.ids.size() ? scene.ids[i] : std::to_string(i + 1);
    s += "<circle cx=\"" + px(obs[i].x) + "\" cy=\"" + py(obs[i].y) +
         "\" r=\"3.5\" fill=\"#303030\"/>\n";
    s += "<text x=\"" + px(obs[i].x) + "\" y=\"" + py(obs[i].y) +
         "\" dx=\"5\" dy=\"12\" font-family=\"sans-serif\" font-size=\"10\">" +
         detail::xml_escape(label) + "</text>\n";
  }
  if (!scene.removed.empty()) {
    double y = 44.0;
    s += "<text x=\"12\" y=\"" + fmt("%.0f", y) +
         "\" font-family=\"sans-serif\" font-size=\"12\">removed axes (G)</text>\n";
    for (const RemovedAxis& r : scene.removed) {
      y += 16.0;
      s += "<text x=\"12\" y=\"" + fmt("%.0f", y) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" +
           detail::xml_escape(name_of_attr(r.attribute)) + " " + fmt("%.4g", r.avg_stress) +
           "</text>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

}  // namespace mdsbiplot
