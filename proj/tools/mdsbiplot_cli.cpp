// mdsbiplot: fit MDS embeddings and draw biplots from CSV data.
//
// Exit codes: 0 ok, 1 usage/config/data error, 2 fit did not converge,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mdsbiplot/config.hpp"
#include "mdsbiplot/dataset.hpp"
#include "mdsbiplot/error.hpp"
#include "mdsbiplot/pipeline.hpp"
#include "mdsbiplot/serialize.hpp"
#include "mdsbiplot/svg.hpp"

namespace fs = std::filesystem;
using namespace mdsbiplot;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNotConverged = 2;
constexpr int kNumerical = 3;

struct Flags {
  std::string config;
  std::map<std::string, std::optional<std::string>> values;  // config key -> flag value
  std::optional<std::string> input;
  bool no_header = false;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write '" + path.string() + "'");
  out << text;
}

// Flags shared by fit, biplot and compare. Every flag maps onto a config key,
// so a config file and the command line go through the same parser.
void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("input", f.input, "input CSV file");
  cmd->add_option("--config", f.config, "key = value configuration file");
  cmd->add_flag("--no-header", f.no_header, "first CSV row is data");
  const std::pair<const char*, const char*> opts[] = {
      {"--id-column", "id_column"},   {"--hd", "kind_hd"},
      {"--ld", "kind_ld"},            {"--m", "m"},
      {"--grid-c", "grid_c"},         {"--grid-step", "grid_step"},
      {"--display-range", "display_range"},
      {"--scale", "scale"},           {"--keep", "keep"},
      {"--threshold", "threshold"},   {"--seed", "seed"},
      {"--method", "method"},         {"--out", "out"},
      {"--max-iterations", "max_iterations"},
      {"--tolerance", "tolerance"},   {"--step-rule", "step_rule"},
      {"--restarts", "restarts"},     {"--init", "init"},
      {"--axis-restarts", "axis_restarts"},
      {"--threads", "threads"},
  };
  for (const auto& [flag, key] : opts) {
    cmd->add_option(flag, f.values[key], std::string("sets ") + key);
  }
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) load_config_file(cfg, f.config);
  if (f.input) cfg.input = *f.input;
  if (f.no_header) cfg.has_header = false;
  for (const auto& [key, value] : f.values) {
    if (value) apply_setting(cfg, key, *value);
  }
  if (cfg.input.empty()) throw std::invalid_argument("no input CSV given");
  cfg.validate();
  return cfg;
}

Dataset load(const RunConfig& cfg) { return ingest_csv(cfg.input, cfg.has_header, cfg.id_column); }

int cmd_fit(const Flags& f) {
  const RunConfig cfg = resolve(f);
  const Dataset ds = load(cfg);
  const Embedding emb = run_fit(ds, cfg);
  fs::create_directories(cfg.out);
  write_file(fs::path(cfg.out) / "embedding.json", dump(embedding_json(emb)));
  write_file(fs::path(cfg.out) / "embedding.csv", embedding_csv(emb, ds.ids));
  std::printf("stress=%.10g iterations=%d converged=%s\n", emb.final_stress, emb.iterations,
              emb.converged ? "true" : "false");
  return emb.converged ? kOk : kNotConverged;
}

int cmd_biplot(const Flags& f) {
  const RunConfig cfg = resolve(f);
  const Dataset ds = load(cfg);
  const BiplotScene scene = run_biplot(ds, cfg, cfg.threads);
  fs::create_directories(cfg.out);
  write_file(fs::path(cfg.out) / "scene.json", dump(scene_json(scene)));
  write_file(fs::path(cfg.out) / "scene.svg", render_svg(scene));
  std::printf("method=%s stress=%.10g axes=%zu removed=%zu\n", scene.method.c_str(),
              scene.embedding.final_stress, scene.traces.size(), scene.removed.size());
  return scene.embedding.converged ? kOk : kNotConverged;
}

int cmd_compare(const Flags& f) {
  const RunConfig cfg = resolve(f);
  const Dataset ds = load(cfg);
  const auto cells = run_compare(ds, cfg, cfg.threads);
  fs::create_directories(cfg.out);
  int rc = kOk;
  for (const CompareCell& c : cells) {
    if (!c.skipped.empty()) {
      std::fprintf(stderr, "skip %s: %s\n", c.name.c_str(), c.skipped.c_str());
      continue;
    }
    if (!c.error.empty()) {
      std::fprintf(stderr, "fail %s: %s\n", c.name.c_str(), c.error.c_str());
      rc = kNumerical;
      continue;
    }
    write_file(fs::path(cfg.out) / (c.name + ".json"), dump(scene_json(*c.scene)));
    write_file(fs::path(cfg.out) / (c.name + ".svg"), render_svg(*c.scene));
    std::printf("%-22s stress=%.10g\n", c.name.c_str(), c.scene->embedding.final_stress);
    if (!c.scene->embedding.converged && rc == kOk) rc = kNotConverged;
  }
  write_file(fs::path(cfg.out) / "summary.json", dump(compare_summary(cells)));
  return rc;
}

int cmd_simulate(const SimulationSpec& spec, const std::string& out, unsigned threads) {
  const SimulationReport report = run_simulate(spec, threads);
  fs::create_directories(out);
  write_file(fs::path(out) / "simulation.json", dump(simulation_json(report)));
  write_file(fs::path(out) / "simulation.csv", simulation_csv(report));
  std::printf("replications=%d completed=%d fraction_g3_highest=%.4f spearman=%.4f\n",
              spec.replications, report.completed, report.fraction_g3_highest,
              report.spearman_sd3_gap);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MDS embeddings and biplots from CSV data"};
  app.require_subcommand(1);

  Flags fit_flags, biplot_flags, compare_flags;
  add_run_flags(app.add_subcommand("fit", "fit an MDS embedding"), fit_flags);
  add_run_flags(app.add_subcommand("biplot", "embedding plus attribute axes (gmb, pca, nb, dcm)"),
                biplot_flags);
  add_run_flags(app.add_subcommand("compare", "run every supported method/metric pair"),
                compare_flags);

  SimulationSpec spec;
  std::string sim_out = ".";
  unsigned sim_threads = 1;
  CLI::App* sim = app.add_subcommand("simulate", "low-variance attribute simulation");
  sim->add_option("--replications", spec.replications, "number of replications");
  sim->add_option("--n", spec.n, "observations per replication");
  sim->add_option("--seed", spec.seed, "base seed; replication i uses seed + i");
  sim->add_option("--grid-c", spec.grid_c, "axis grid half-width");
  sim->add_option("--grid-step", spec.grid_step, "axis grid spacing");
  sim->add_option("--threshold", spec.threshold, "reported pass mark for the G(3) fraction");
  sim->add_option("--out", sim_out, "output directory");
  sim->add_option("--threads", sim_threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (app.got_subcommand("fit")) return cmd_fit(fit_flags);
    if (app.got_subcommand("biplot")) return cmd_biplot(biplot_flags);
    if (app.got_subcommand("compare")) return cmd_compare(compare_flags);
    if (app.got_subcommand("simulate")) return cmd_simulate(spec, sim_out, sim_threads);
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
