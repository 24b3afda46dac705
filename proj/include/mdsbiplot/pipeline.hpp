#pragma once

// End-to-end runs behind the command-line tool: fit, biplot, compare and the
// low-variance-attribute simulation.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mdsbiplot/baselines.hpp"
#include "mdsbiplot/config.hpp"
#include "mdsbiplot/dataset.hpp"
#include "mdsbiplot/gmb.hpp"
#include "mdsbiplot/mds.hpp"
#include "mdsbiplot/parallel.hpp"
#include "mdsbiplot/serialize.hpp"

namespace mdsbiplot {

inline Matrix prepare_data(const Dataset& ds, ScaleMode mode, Dissimilarity kind_hd) {
  Matrix x = scale_columns(ds.X, mode);
  if (requires_nonnegative_inputs(kind_hd) && x.minCoeff() < 0.0) {
    throw std::invalid_argument(to_string(kind_hd) + " needs nonnegative data; scale with " +
                                "unit_interval or none (got " + to_string(mode) + ")");
  }
  return x;
}

/// Stress-minimizing embedding of the scaled data.
inline Embedding run_fit(const Dataset& ds, const RunConfig& cfg) {
  cfg.validate();
  const Matrix x = prepare_data(ds, cfg.scale.value_or(ScaleMode::zscore), cfg.kind_hd);
  return fit_mds(x, cfg.kind_hd, cfg.kind_ld, cfg.m, cfg.fit_options());
}

namespace detail {

inline PruneRule prune_rule(const RunConfig& cfg, Eigen::Index p) {
  if (cfg.threshold) return PruneRule::above(*cfg.threshold);
  return PruneRule::keep_count(cfg.keep.value_or(p));
}

inline BiplotScene gmb_scene(const Matrix& x, const RunConfig& cfg, unsigned threads) {
  const Embedding emb = fit_mds(x, cfg.kind_hd, cfg.kind_ld, cfg.m, cfg.fit_options());
  auto traces = trace_all_axes(cfg.grid(), x, emb.Z, {cfg.kind_hd, cfg.kind_ld},
                               cfg.axis_options(), threads);
  return prune_axes(emb, std::move(traces), prune_rule(cfg, x.cols()));
}

// Gabriel's biplot with alpha = b = 1: points X V_1, arrows V_1, so the axis
// of attribute k is l times row k of V_1. g is scored under inner products,
// the metric for which this is the stress-optimal labeling.
inline BiplotScene pca_scene(const Matrix& x, const RunConfig& cfg) {
  const PcaBiplot bp = pca_biplot(x, cfg.m);
  const AxisKinds ip{Dissimilarity::inner_product, Dissimilarity::inner_product};
  Embedding emb;
  emb.Z = bp.points;
  emb.kind_hd = emb.kind_ld = Dissimilarity::inner_product;
  emb.final_stress = stress(emb.Z, x, ip.hd, ip.ld);
  emb.seed = cfg.seed;
  emb.converged = true;
  const AxisGrid grid = cfg.grid();
  std::vector<AxisTrace> traces;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    AxisTrace t;
    t.attribute = k;
    t.ell = grid.values;
    for (double ell : grid.values) {
      Vector b = closed_form_axis_ip(k, ell, bp.arrows);
      t.point_stress.push_back(point_stress(b, axis_point(k, ell, x.cols()), x, emb.Z, ip));
      t.points.push_back(std::move(b));
    }
    t.avg_stress = axis_avg_stress(t);
    traces.push_back(std::move(t));
  }
  return prune_axes(emb, std::move(traces), prune_rule(cfg, x.cols()));
}

inline BiplotScene nb_scene(const Matrix& x, const RunConfig& cfg) {
  const NonlinearBiplot nb = NonlinearBiplot::fit(x, cfg.kind_hd, cfg.m);
  Embedding emb;
  emb.Z = nb.Z();
  emb.kind_hd = cfg.kind_hd;
  emb.kind_ld = Dissimilarity::euclidean;
  emb.final_stress = stress(emb.Z, x, emb.kind_hd, emb.kind_ld);
  emb.seed = cfg.seed;
  emb.converged = true;
  const AxisGrid grid = cfg.grid();
  std::vector<AxisTrace> traces;
  for (Eigen::Index k = 0; k < x.cols(); ++k) traces.push_back(nb.trace(k, grid));
  return prune_axes(emb, std::move(traces), prune_rule(cfg, x.cols()));
}

inline BiplotScene dcm_scene(const Matrix& x01, const RunConfig& cfg) {
  const CompositeDistanceMatrix cdm = dcm_build_cdm(x01, cfg.kind_hd);
  const DcmProjection proj = dcm_project(cdm, cfg.m, cfg.kind_ld, cfg.fit_options(), cfg.kind_hd);
  BiplotScene scene;
  scene.embedding = proj.embedding;
  scene.embedding.Z = proj.obs_points;
  scene.attr_points = proj.attr_points;
  return scene;
}

}  // namespace detail

/// Embedding plus attribute labels for cfg.method.
inline BiplotScene run_biplot(const Dataset& ds, const RunConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  const Matrix x = prepare_data(ds, cfg.effective_scale(), cfg.kind_hd);
  BiplotScene scene;
  switch (cfg.method) {
    case Method::gmb: scene = detail::gmb_scene(x, cfg, threads); break;
    case Method::pca: scene = detail::pca_scene(x, cfg); break;
    case Method::nb: scene = detail::nb_scene(x, cfg); break;
    case Method::dcm: scene = detail::dcm_scene(x, cfg); break;
  }
  scene.method = scene_tag(cfg.method);
  scene.ids = ds.ids;
  scene.attribute_names = ds.names;
  scene.display = cfg.display;
  return scene;
}

// ---------------------------------------------------------------------------
// compare

struct CompareCell {
  std::string name;
  Method method = Method::gmb;
  Dissimilarity kind_hd = Dissimilarity::euclidean;
  Dissimilarity kind_ld = Dissimilarity::euclidean;
  std::string skipped;  // reason, when the pair is unsupported
  std::string error;    // set when the run failed
  std::optional<BiplotScene> scene;
};

/// Every method/metric cell of the comparison grid, in a fixed order. The
/// inner-product GMB cell reproduces the PCA biplot.
inline std::vector<CompareCell> compare_plan() {
  std::vector<CompareCell> plan;
  auto add = [&](Method m, Dissimilarity hd, Dissimilarity ld = Dissimilarity::euclidean) {
    CompareCell c;
    c.name = to_string(m) + "_" + to_string(hd);
    c.method = m;
    c.kind_hd = hd;
    c.kind_ld = ld;
    c.skipped = method_metric_diagnostic(m, hd, ld);
    plan.push_back(std::move(c));
  };
  for (Method m : {Method::nb, Method::dcm, Method::gmb}) {
    for (Dissimilarity hd :
         {Dissimilarity::euclidean, Dissimilarity::manhattan, Dissimilarity::cosine}) {
      add(m, hd);
    }
  }
  add(Method::gmb, Dissimilarity::inner_product, Dissimilarity::inner_product);
  return plan;
}

/// Runs the plan; cell i uses seed + i. Failures are recorded per cell.
inline std::vector<CompareCell> run_compare(const Dataset& ds, const RunConfig& base,
                                            unsigned threads = 1) {
  std::vector<CompareCell> cells = compare_plan();
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    CompareCell& cell = cells[i];
    if (!cell.skipped.empty()) return;
    RunConfig cfg = base;
    cfg.method = cell.method;
    cfg.kind_hd = cell.kind_hd;
    cfg.kind_ld = cell.kind_ld;
    cfg.scale.reset();
    cfg.seed = base.seed + i;
    try {
      cell.scene = run_biplot(ds, cfg, 1);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });
  return cells;
}

inline Json compare_summary(const std::vector<CompareCell>& cells) {
  Json out;
  Json done = Json::array();
  Json skipped = Json::array();
  Json failed = Json::array();
  for (const CompareCell& c : cells) {
    if (!c.skipped.empty()) {
      skipped.push_back({{"cell", c.name}, {"reason", c.skipped}});
    } else if (!c.error.empty()) {
      failed.push_back({{"cell", c.name}, {"error", c.error}});
    } else {
      const Embedding& e = c.scene->embedding;
      done.push_back({{"cell", c.name},
                      {"method", c.scene->method},
                      {"kind_hd", to_string(c.kind_hd)},
                      {"kind_ld", to_string(c.kind_ld)},
                      {"stress", e.final_stress},
                      {"converged", e.converged}});
    }
  }
  out["scenes"] = std::move(done);
  out["skipped"] = std::move(skipped);
  out["failed"] = std::move(failed);
  return out;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulationSpec {
  Eigen::Index n = 25;
  int replications = 1000;
  std::array<std::pair<double, double>, 3> sd_ranges{{{0.5, 1.0}, {0.5, 1.0}, {0.0, 0.5}}};
  Dissimilarity kind_hd = Dissimilarity::manhattan;
  Dissimilarity kind_ld = Dissimilarity::euclidean;
  Eigen::Index m = 2;
  double grid_c = 5.0;
  double grid_step = 0.1;
  std::uint64_t seed = 0;
  double threshold = 0.85;  // reported pass mark for the G(3)-highest fraction

  void validate() const {
    if (replications < 1) throw std::invalid_argument("simulate: replications must be >= 1");
    if (n < 3) throw std::invalid_argument("simulate: n must be >= 3");
    for (const auto& [lo, hi] : sd_ranges) {
      if (!(lo >= 0.0 && lo <= hi)) throw std::invalid_argument("simulate: bad sd range");
    }
    (void)AxisGrid::uniform(grid_c, grid_step);
  }
};

struct Replication {
  int index = 0;
  std::uint64_t seed = 0;
  std::array<double, 3> sd{};
  std::array<double, 3> G{};
  bool ok = false;
  std::string error;

  double gap() const { return G[2] - std::max(G[0], G[1]); }
};

struct SimulationReport {
  SimulationSpec spec;
  std::vector<Replication> rows;
  int completed = 0;
  double fraction_g3_highest = 0.0;
  double spearman_sd3_gap = 0.0;
};

namespace detail {

inline Vector average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  Vector ranks(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks(static_cast<Eigen::Index>(order[t])) = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

/// Pearson correlation of average ranks.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("spearman: need two equal-length samples of size >= 2");
  }
  return pearson_correlation(detail::average_ranks(a), detail::average_ranks(b));
}

/// One replication: normal data with column sd rescaled to draws from the
/// spec ranges, an MDS fit, and G(k) for each attribute.
inline Replication simulate_once(const SimulationSpec& spec, int index) {
  Replication rep;
  rep.index = index;
  rep.seed = spec.seed + static_cast<std::uint64_t>(index);
  std::mt19937_64 rng(rep.seed);
  for (std::size_t k = 0; k < 3; ++k) {
    std::uniform_real_distribution<double> u(spec.sd_ranges[k].first, spec.sd_ranges[k].second);
    rep.sd[k] = u(rng);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(spec.n, 3);
  for (Eigen::Index i = 0; i < spec.n; ++i)
    for (Eigen::Index k = 0; k < 3; ++k) x(i, k) = normal(rng);
  x = center_columns(x);
  for (Eigen::Index k = 0; k < 3; ++k) {
    x.col(k) *= rep.sd[static_cast<std::size_t>(k)] / sample_sd(x.col(k));
  }
  try {
    FitOptions opts;
    opts.seed = rep.seed;
    const Embedding emb = fit_mds(x, spec.kind_hd, spec.kind_ld, spec.m, opts);
    const auto traces = trace_all_axes(AxisGrid::uniform(spec.grid_c, spec.grid_step), x, emb.Z,
                                       {spec.kind_hd, spec.kind_ld});
    for (std::size_t k = 0; k < 3; ++k) rep.G[k] = traces[k].avg_stress;
    rep.ok = true;
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  return rep;
}

inline SimulationReport run_simulate(const SimulationSpec& spec, unsigned threads = 1) {
  spec.validate();
  SimulationReport report;
  report.spec = spec;
  report.rows.resize(static_cast<std::size_t>(spec.replications));
  parallel_for(report.rows.size(), threads, [&](std::size_t i) {
    report.rows[i] = simulate_once(spec, static_cast<int>(i));
  });
  std::vector<double> sd3, gap;
  int highest = 0;
  for (const Replication& r : report.rows) {
    if (!r.ok) continue;
    ++report.completed;
    if (r.G[2] > std::max(r.G[0], r.G[1])) ++highest;
    sd3.push_back(r.sd[2]);
    gap.push_back(r.gap());
  }
  if (report.completed > 0) {
    report.fraction_g3_highest = static_cast<double>(highest) / report.completed;
  }
  report.spearman_sd3_gap = sd3.size() >= 2 ? spearman(sd3, gap) : 0.0;
  return report;
}

inline Json simulation_json(const SimulationReport& r) {
  Json out;
  out["n"] = r.spec.n;
  out["p"] = 3;
  out["m"] = r.spec.m;
  out["kind_hd"] = to_string(r.spec.kind_hd);
  out["kind_ld"] = to_string(r.spec.kind_ld);
  out["seed"] = r.spec.seed;
  out["replications"] = r.spec.replications;
  out["completed"] = r.completed;
  out["fraction_g3_highest"] = r.fraction_g3_highest;
  out["threshold"] = r.spec.threshold;
  out["passes_threshold"] = r.fraction_g3_highest >= r.spec.threshold;
  out["spearman_sd3_vs_gap"] = r.spearman_sd3_gap;
  Json rows = Json::array();
  for (const Replication& rep : r.rows) {
    Json row;
    row["index"] = rep.index;
    row["seed"] = rep.seed;
    row["sd"] = rep.sd;
    if (rep.ok) {
      row["G"] = rep.G;
    } else {
      row["error"] = rep.error;
    }
    rows.push_back(std::move(row));
  }
  out["table"] = std::move(rows);
  return out;
}

inline std::string simulation_csv(const SimulationReport& r) {
  std::string out = "index,seed,sd1,sd2,sd3,G1,G2,G3\n";
  char buf[256];
  for (const Replication& rep : r.rows) {
    if (!rep.ok) continue;
    std::snprintf(buf, sizeof buf, "%d,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", rep.index,
                  static_cast<unsigned long long>(rep.seed), rep.sd[0], rep.sd[1], rep.sd[2],
                  rep.G[0], rep.G[1], rep.G[2]);
    out += buf;
  }
  return out;
}

}  // namespace mdsbiplot
