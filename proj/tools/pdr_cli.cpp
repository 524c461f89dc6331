// pdr: command-line front end for the dead-reckoning pipeline.
//
//   pdr import   <raw> --mapping <file> -o <log.csv>
//   pdr simulate [--spec <file>] [--set key=value]... --out-dir <dir>
//   pdr single   <log.csv> [--no-closure] --out-dir <dir>
//   pdr dual     <log1.csv> <log2.csv> --out-dir <dir>
//   pdr compare  <a.csv> <b.csv> [--metric dtw|frechet] [--band N] [--pairs <file>]
//   pdr average  <a.csv> <b.csv> [--band N] [--timed] -o <out.csv>
//
// Exit codes: 0 ok, 2 input error, 3 numerical divergence.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdr/averaging.hpp"
#include "pdr/dual.hpp"
#include "pdr/ingest.hpp"
#include "pdr/pipeline.hpp"
#include "pdr/report.hpp"
#include "pdr/sim.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kDivergence = 3;

struct PipelineFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<double> zupt_gamma;
  std::optional<long> zupt_window;
  std::optional<double> r_dual;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Flat key = value pipeline config");
    cmd->add_option("--set", overrides, "Override one config key (key=value); repeatable");
    cmd->add_option("--zupt-gamma", zupt_gamma, "Stance detector threshold");
    cmd->add_option("--zupt-window", zupt_window, "Stance detector window (odd, samples)");
    cmd->add_option("--r-dual", r_dual, "Std of the inter-leg tie [m]; inf disables it");
  }

  [[nodiscard]] pdr::PipelineConfig resolve() const {
    pdr::KeyValues kv = config_path.empty() ? pdr::KeyValues{} : pdr::KeyValues::load(config_path);
    apply_overrides(kv, overrides);
    if (zupt_gamma) kv.set("zupt.gamma", pdr::number_text(*zupt_gamma));
    if (zupt_window) kv.set("zupt.window", std::to_string(*zupt_window));
    if (r_dual) kv.set("filter.r_dual", pdr::number_text(*r_dual));
    return pdr::PipelineConfig::from(kv);
  }

  static void apply_overrides(pdr::KeyValues& kv, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw pdr::InputError("config", "--set expects key=value, got '" + o + "'");
      kv.set(std::string(pdr::trim(o.substr(0, eq))), std::string(pdr::trim(o.substr(eq + 1))));
    }
  }
};

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw pdr::InputError("report", "cannot create " + dir + ": " + ec.message());
  return p;
}

std::optional<std::size_t> band_option(long band) {
  if (band < 0) return std::nullopt;
  return static_cast<std::size_t>(band);
}

int cmd_import(const std::string& input, const std::string& mapping, const std::string& output) {
  const auto log = pdr::import_log(fs::path(input), pdr::ImportMapping::load(mapping));
  pdr::write_log(fs::path(output), log);
  std::cout << "imported " << log.size() << " samples at " << pdr::number_text(log.nominal_rate())
            << " Hz -> " << output << "\n";
  return kOk;
}

int cmd_simulate(const std::string& spec_path, const std::vector<std::string>& overrides,
                 const std::string& out_dir) {
  pdr::KeyValues kv = spec_path.empty() ? pdr::KeyValues{} : pdr::KeyValues::load(spec_path);
  PipelineFlags::apply_overrides(kv, overrides);
  const pdr::GaitSpec spec = pdr::GaitSpec::from(kv);
  const pdr::SimResult sim = pdr::generate(spec);
  const fs::path dir = prepare_dir(out_dir);
  pdr::write_log(dir / "leg1.csv", sim.log1);
  pdr::write_log(dir / "leg2.csv", sim.log2);
  pdr::write_trajectory_csv(dir / "truth1.csv", sim.truth.leg_frame(1));
  pdr::write_trajectory_csv(dir / "truth2.csv", sim.truth.leg_frame(2));
  std::cout << "simulated " << sim.log1.size() << " samples ("
            << pdr::number_text(sim.log1.duration()) << " s) -> " << dir.string() << "\n";
  return kOk;
}

int cmd_single(const std::string& log_path, const PipelineFlags& flags, bool no_closure,
               const std::string& out_dir) {
  const pdr::PipelineConfig config = flags.resolve();
  const pdr::PreparedLeg leg = pdr::prepare_leg(pdr::parse_log(fs::path(log_path), config.ingest), config);
  const auto mode = no_closure ? pdr::SolveMode::no_closure : pdr::SolveMode::closed_loop;
  const pdr::LegSolution solution = pdr::solve_leg(leg, config, mode);
  const pdr::SingleSummary summary = pdr::summarize(leg, solution, mode);
  const fs::path dir = prepare_dir(out_dir);
  pdr::write_trajectory_csv(dir / "trajectory.csv", solution.trajectory);
  pdr::write_text(dir / "summary.json", pdr::single_summary_json(summary));
  pdr::write_text(dir / "trajectory.svg",
                  pdr::render_svg({{&solution.trajectory, "#1f77b4", pdr::mode_name(mode)}},
                                  "single IMU: " + fs::path(log_path).filename().string()));
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "closure residual " << pdr::number_text(summary.closure_residual_m) << " m, path length "
            << pdr::number_text(summary.path_length_m) << " m -> " << dir.string() << "\n";
  return kOk;
}

int cmd_dual(const std::string& log1, const std::string& log2, const PipelineFlags& flags,
             const std::string& out_dir) {
  const pdr::PipelineConfig config = flags.resolve();
  pdr::DualRun run = pdr::run_dual_pipeline(pdr::parse_log(fs::path(log1), config.ingest),
                                            pdr::parse_log(fs::path(log2), config.ingest), config);
  const fs::path dir = prepare_dir(out_dir);
  pdr::write_trajectory_csv(dir / "leg1.csv", run.fused1);
  pdr::write_trajectory_csv(dir / "leg2.csv", run.fused2);
  pdr::write_trajectory_csv(dir / "combined.csv", run.combined);
  pdr::write_text(dir / "summary.json", pdr::dual_summary_json(run));
  char caption[64];
  std::snprintf(caption, sizeof(caption), "dual IMU, d = %.3f", run.dtw_between_legs);
  pdr::write_text(dir / "overlay.svg",
                  pdr::render_svg({{&run.fused1, "#e6b800", "leg 1"},
                                   {&run.fused2, "#00b3b3", "leg 2"},
                                   {&run.combined, "#d62728", "combined"}},
                                  caption));
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "first leg " << run.first.leg << ", yaw offset "
            << pdr::number_text(run.yaw_offset * 180.0 / std::numbers::pi) << " deg, dtw "
            << pdr::number_text(run.dtw_between_legs) << " m -> " << dir.string() << "\n";
  return kOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& metric,
                long band, const std::string& pairs_path) {
  const auto a = pdr::read_trajectory_csv(fs::path(a_path));
  const auto b = pdr::read_trajectory_csv(fs::path(b_path));
  const pdr::MatchResult r =
      metric == "frechet" ? pdr::frechet(a, b, band_option(band)) : pdr::dtw(a, b, band_option(band));
  if (!pairs_path.empty()) {
    std::ofstream out(pairs_path);
    if (!out) throw pdr::InputError("report", "cannot write " + pairs_path);
    out << "i,j\n";
    for (const auto& [i, j] : r.pairs) out << i << ',' << j << '\n';
  }
  nlohmann::ordered_json j;
  j["metric"] = metric;
  j["distance"] = r.distance;
  j["band"] = band < 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(band);
  j["pairs"] = r.pairs.size();
  std::cout << j.dump() << "\n";
  return kOk;
}

int cmd_average(const std::string& a_path, const std::string& b_path, long band, bool timed,
                bool keep_duplicates, const std::string& output) {
  const auto a = pdr::read_trajectory_csv(fs::path(a_path));
  const auto b = pdr::read_trajectory_csv(fs::path(b_path));
  pdr::Trajectory avg;
  if (timed) {
    avg = pdr::average_paths_timed(a, b);
  } else {
    const auto match = pdr::dtw(a, b, band_option(band));
    avg = pdr::average_paths(a, b, match, {.collapse_duplicates = !keep_duplicates});
  }
  pdr::write_trajectory_csv(fs::path(output), avg);
  std::cout << "averaged " << avg.size() << " points -> " << output << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pedestrian dead reckoning from foot-mounted IMUs"};
  app.require_subcommand(1);

  std::string input, mapping, output;
  auto* imp = app.add_subcommand("import", "Convert a foreign log layout to the standard CSV");
  imp->add_option("input", input, "Raw log")->required();
  imp->add_option("--mapping", mapping, "Column mapping file")->required();
  imp->add_option("-o,--output", output, "Standard CSV to write")->required();

  std::string spec_path, out_dir = ".";
  std::vector<std::string> sim_overrides;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic two-foot walk");
  sim->add_option("--spec", spec_path, "Flat key = value gait spec");
  sim->add_option("--set", sim_overrides, "Override one spec key (key=value); repeatable");
  sim->add_option("--out-dir", out_dir, "Output directory");

  std::string log1, log2;
  bool no_closure = false;
  PipelineFlags single_flags, dual_flags;
  auto* single = app.add_subcommand("single", "Closed-loop single-IMU solution");
  single->add_option("log", log1, "Standard CSV log")->required();
  single->add_flag("--no-closure", no_closure, "Velocity-only ZUPTs plus smoothing (baseline)");
  single->add_option("--out-dir", out_dir, "Output directory");
  single_flags.attach(single);

  auto* dual = app.add_subcommand("dual", "Fused two-IMU solution");
  dual->add_option("log1", log1, "Standard CSV log, leg 1")->required();
  dual->add_option("log2", log2, "Standard CSV log, leg 2")->required();
  dual->add_option("--out-dir", out_dir, "Output directory");
  dual_flags.attach(dual);

  std::string a_path, b_path, metric = "dtw", pairs_path;
  long band = -1;
  auto* cmp = app.add_subcommand("compare", "DTW or discrete Frechet distance of two trajectories");
  cmp->add_option("a", a_path, "Trajectory CSV")->required();
  cmp->add_option("b", b_path, "Trajectory CSV")->required();
  cmp->add_option("--metric", metric, "dtw or frechet")->check(CLI::IsMember({"dtw", "frechet"}));
  cmp->add_option("--band", band, "Band width in samples (default: unbanded)");
  cmp->add_option("--pairs", pairs_path, "Write the matched index pairs here");

  bool timed = false, keep_duplicates = false;
  auto* avg = app.add_subcommand("average", "Midpoint average of two trajectories");
  avg->add_option("a", a_path, "Trajectory CSV")->required();
  avg->add_option("b", b_path, "Trajectory CSV")->required();
  avg->add_option("--band", band, "DTW band width in samples (default: unbanded)");
  avg->add_flag("--timed", timed, "Match equal indices instead of DTW");
  avg->add_flag("--keep-duplicates", keep_duplicates, "Keep repeated consecutive midpoints");
  avg->add_option("-o,--output", output, "Trajectory CSV to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*imp) return cmd_import(input, mapping, output);
    if (*sim) return cmd_simulate(spec_path, sim_overrides, out_dir);
    if (*single) return cmd_single(log1, single_flags, no_closure, out_dir);
    if (*dual) return cmd_dual(log1, log2, dual_flags, out_dir);
    if (*cmp) return cmd_compare(a_path, b_path, metric, band, pairs_path);
    if (*avg) return cmd_average(a_path, b_path, band, timed, keep_duplicates, output);
  } catch (const pdr::DivergenceError& e) {
    std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
    return kDivergence;
  } catch (const pdr::Error& e) {
    std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
