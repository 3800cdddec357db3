// Experiment driver: train / eval / sweep / bandwidth / replay subcommands
// over one JSON config with {scenario, train, comms, eval} sections.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ovml/eval/config.hpp"
#include "ovml/eval/evaluate.hpp"
#include "ovml/eval/replay_svg.hpp"
#include "ovml/util/text.hpp"

namespace fs = std::filesystem;
using namespace ovml;

namespace {

// --out paths resolve under $OVML_OUT when that is set and the path is relative
std::string resolve_out(const std::string& out) {
  const char* root = std::getenv("OVML_OUT");
  if (root && *root && !fs::path(out).is_absolute()) {
    return (fs::path(root) / out).string();
  }
  return out;
}

eval::ExperimentConfig load_config(const std::string& config_path,
                                   const std::string& scenario_override,
                                   const std::string& variant_override) {
  eval::ExperimentConfig cfg = eval::ExperimentConfig::from_file(config_path);
  if (!scenario_override.empty()) {
    cfg.scenario = world::ScenarioConfig::from_file(scenario_override);
    cfg.train.batch_size = cfg.scenario.max_steps;
    cfg.channel.fps = cfg.scenario.fps();
    cfg.train.validate(cfg.scenario);
  }
  if (!variant_override.empty()) {
    baselines::variant_from_string(variant_override);
    cfg.variant = variant_override;
  }
  return cfg;
}

void append_metrics_row(const std::string& path, const std::string& row) {
  const bool fresh = !fs::exists(path);
  std::ofstream os(path, std::ios::app);
  if (!os) throw Error("cannot open " + path);
  if (fresh) os << eval::metrics_csv_header() << '\n';
  os << row << '\n';
}

void print_metrics(const eval::EvalMetrics& m, const std::string& label) {
  std::printf("%s over %d episodes:\n", label.c_str(), m.n_episodes);
  std::printf("  avg reward    %s +/- %s\n", util::fmt_f(m.avg_reward_mean, 2).c_str(),
              util::fmt_f(m.avg_reward_std, 2).c_str());
  std::printf("  avg speed     %s +/- %s km/h\n",
              util::fmt_f(m.avg_speed_mean, 2).c_str(),
              util::fmt_f(m.avg_speed_std, 2).c_str());
  std::printf("  collision     %s%%\n", util::fmt_f(m.collision_rate_pct, 2).c_str());
  std::printf("  success       %s%%\n", util::fmt_f(m.success_rate_pct, 2).c_str());
  std::printf("  timeout       %s%%\n", util::fmt_f(m.timeout_rate_pct, 2).c_str());
}

struct BandwidthReport {
  std::string preset;
  int c = 4, h = 128, w = 128;
  double fps = 20.0;
  double ratio = 0.0;  // > 0: report raw/ratio as the compressed figure
  std::size_t scan_points = 47240;
  comms::ProtocolBudgets budgets;
};

std::string bandwidth_text(const BandwidthReport& r) {
  std::string out;
  out += "preset: " + r.preset + "\n";
  out += "feature extents: " + std::to_string(r.c) + "x" + std::to_string(r.h) + "x" +
         std::to_string(r.w) + " (" + std::to_string(r.c * r.h * r.w) + " values)\n";
  out += "frame rate: " + util::fmt_f(r.fps, 0) + " fps\n";
  const std::size_t raw_bytes = static_cast<std::size_t>(r.c) * r.h * r.w * 4;
  const double raw_mbps = comms::raw_f32_mbps(r.c, r.h, r.w, r.fps);
  out += "raw f32 features: " + std::to_string(raw_bytes) +
         " bytes/frame = " + util::fmt_f(raw_mbps, 4) + " Mbps\n";
  const std::size_t wire_bytes =
      comms::kWireHeaderBytes + static_cast<std::size_t>(r.c) * r.h * r.w;
  const double wire_mbps = comms::bandwidth_mbps(wire_bytes, r.fps);
  out += "8-bit quantized wire stream: " + std::to_string(wire_bytes) +
         " bytes/frame = " + util::fmt_f(wire_mbps, 4) + " Mbps (ratio " +
         util::fmt_f(raw_mbps / wire_mbps, 2) + " vs raw f32)\n";
  double compressed;
  if (r.ratio > 0.0) {
    out += "overall compression ratio: " + util::fmt_f(r.ratio, 1) + "\n";
    compressed = comms::ratio_reported_mbps(r.c, r.h, r.w, r.fps, r.ratio);
  } else {
    compressed = wire_mbps;
  }
  out += "compressed: " + util::fmt_f(compressed, 4) + " Mbps\n";
  out += "DSRC " + util::fmt_f(r.budgets.dsrc_mbps, 1) + " Mbps budget: " +
         (comms::budget_check(compressed, r.budgets.dsrc_mbps) ? "pass" : "fail") + "\n";
  out += "C-V2X " + util::fmt_f(r.budgets.cv2x_mbps, 1) + " Mbps budget: " +
         (comms::budget_check(compressed, r.budgets.cv2x_mbps) ? "pass" : "fail") + "\n";
  const double pc_mbps = comms::point_cloud_mbps(r.scan_points, r.fps);
  out += "raw point cloud at " + std::to_string(r.scan_points) +
         " points: " + util::fmt_f(pc_mbps, 4) + " Mbps, DSRC budget: " +
         (comms::budget_check(pc_mbps, r.budgets.dsrc_mbps) ? "pass" : "fail") + "\n";
  return out;
}

int run_train(const std::string& config_path, const std::string& scenario_override,
              const std::string& variant_override, std::string out_dir,
              std::uint64_t seed_override, int episodes_override) {
  eval::ExperimentConfig cfg =
      load_config(config_path, scenario_override, variant_override);
  if (seed_override) cfg.root_seed = seed_override;
  if (episodes_override > 0) cfg.train.episodes = episodes_override;
  out_dir = resolve_out(out_dir);
  const auto variant = baselines::variant_from_string(cfg.variant);
  std::printf("training %s on %s for %d episodes -> %s\n", cfg.variant.c_str(),
              cfg.scenario.name.c_str(), cfg.train.episodes, out_dir.c_str());
  const mappo::TrainResult r = mappo::train(cfg.scenario, cfg.train, cfg.channel,
                                            variant, out_dir, cfg.root_seed);
  std::printf("checkpoint: %s\n", r.checkpoint_path.c_str());
  std::printf("learning curve: %s\n", r.curve_path.c_str());
  if (r.aborted_on_nan) {
    std::fprintf(stderr, "training aborted on non-finite loss after %d episodes; "
                         "last good parameters kept\n", r.episodes_run);
    return 1;
  }
  return 0;
}

int run_eval(const std::string& config_path, const std::string& scenario_override,
             const std::string& variant_override, const std::string& checkpoint,
             bool use_ttc, std::string out_dir, int episodes, std::int64_t seed,
             double dropout, bool traces, bool ledger) {
  eval::ExperimentConfig cfg =
      load_config(config_path, scenario_override, variant_override);
  if (episodes == 0) {
    throw ConfigError("eval.episodes: must be >= 1");
  }
  eval::EvalRequest req;
  req.n_episodes = episodes > 0 ? episodes : cfg.eval.episodes;
  req.seed = seed >= 0 ? static_cast<std::uint64_t>(seed) : cfg.eval.seed;
  req.dropout_rate = dropout;
  if (req.dropout_rate < 0.0 || req.dropout_rate > 1.0) {
    throw ConfigError("eval.dropout: outside [0,1]");
  }
  out_dir = resolve_out(out_dir);
  fs::create_directories(out_dir);
  if (traces) req.trace_dir = (fs::path(out_dir) / "traces").string();
  if (ledger) req.ledger_path = (fs::path(out_dir) / "bandwidth_ledger.csv").string();

  eval::EvalMetrics m;
  std::string label;
  if (use_ttc) {
    label = "ttc";
    m = eval::evaluate_ttc(cfg.scenario, cfg.eval.ttc, req);
  } else {
    if (checkpoint.empty()) {
      throw ConfigError("eval: either --checkpoint or --ttc is required");
    }
    label = cfg.variant;
    const auto variant = baselines::variant_from_string(cfg.variant);
    const mappo::PolicySet policy =
        mappo::load_policy(checkpoint, cfg.scenario, cfg.train, variant);
    m = eval::evaluate_policy(cfg.scenario, policy, variant, cfg.channel,
                              comms::aggregation_from_string(cfg.train.aggregation),
                              req);
  }
  print_metrics(m, label);
  append_metrics_row((fs::path(out_dir) / "metrics.csv").string(),
                     eval::metrics_csv_row(label, cfg.scenario.name, req.seed,
                                           req.dropout_rate, m));
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& scenario_override,
              const std::string& variant_override, const std::string& checkpoint,
              std::string out_dir, const std::string& rates_csv, int episodes,
              std::int64_t seed) {
  eval::ExperimentConfig cfg =
      load_config(config_path, scenario_override, variant_override);
  std::vector<double> rates = cfg.eval.dropout_rates;
  if (!rates_csv.empty()) {
    rates.clear();
    for (const std::string& tok : util::split(rates_csv, ',')) {
      rates.push_back(std::stod(tok));
    }
  }
  out_dir = resolve_out(out_dir);
  fs::create_directories(out_dir);
  const std::string sweep_path = (fs::path(out_dir) / "sweep.csv").string();
  std::ofstream os(sweep_path, std::ios::trunc);
  os << eval::metrics_csv_header() << '\n';
  if (rates.empty()) {
    std::printf("empty rate list; wrote header-only %s\n", sweep_path.c_str());
    return 0;
  }
  const auto variant = baselines::variant_from_string(cfg.variant);
  const mappo::PolicySet policy =
      mappo::load_policy(checkpoint, cfg.scenario, cfg.train, variant);
  const int n_eps = episodes > 0 ? episodes : cfg.eval.episodes;
  const std::uint64_t s = seed >= 0 ? static_cast<std::uint64_t>(seed) : cfg.eval.seed;
  const auto rows = eval::dropout_sweep(
      cfg.scenario, policy, variant, cfg.channel,
      comms::aggregation_from_string(cfg.train.aggregation), rates, n_eps, s);
  for (const auto& row : rows) {
    os << eval::metrics_csv_row(cfg.variant, cfg.scenario.name, s, row.dropout_rate,
                                row.metrics)
       << '\n';
    std::printf("dropout %.2f: success %.2f%%, collision %.2f%%\n", row.dropout_rate,
                row.metrics.success_rate_pct, row.metrics.collision_rate_pct);
  }
  std::printf("sweep table: %s\n", sweep_path.c_str());
  return 0;
}

int run_bandwidth(const std::string& config_path, const std::string& preset,
                  const std::string& out_file) {
  BandwidthReport r;
  if (!preset.empty()) {
    if (preset == "paper-scale") {
      r.preset = "paper-scale";
      r.c = 4;
      r.h = 128;
      r.w = 128;
      r.fps = 20.0;
      r.ratio = 39.0;
      r.scan_points = 47240;
    } else if (preset == "desk-scale") {
      r.preset = "desk-scale";
      r.c = 4;
      r.h = 32;
      r.w = 32;
      r.fps = 20.0;
      r.scan_points = 5760;
    } else {
      throw ConfigError("bandwidth.preset: unknown value '" + preset + "'");
    }
  } else if (!config_path.empty()) {
    eval::ExperimentConfig cfg = load_config(config_path, "", "");
    r.preset = "config:" + cfg.scenario.name;
    r.c = cfg.train.feature_channels;
    r.h = cfg.scenario.lidar.bev_cells;
    r.w = cfg.scenario.lidar.bev_cells;
    r.fps = cfg.channel.fps;
    r.budgets = cfg.channel.budgets;
    r.scan_points = static_cast<std::size_t>(cfg.scenario.rays_per_step());
  } else {
    throw ConfigError("bandwidth: either --config or --preset is required");
  }
  const std::string text = bandwidth_text(r);
  std::fputs(text.c_str(), stdout);
  if (!out_file.empty()) {
    std::ofstream os(resolve_out(out_file), std::ios::trunc);
    os << text;
  }
  return 0;
}

int run_replay(const std::string& trace_path, const std::string& config_path,
               std::string out_dir, bool svg, int every) {
  std::ifstream is(trace_path);
  if (!is) throw ConfigError("replay: cannot open trace " + trace_path);
  std::optional<world::ScenarioConfig> scenario;
  if (!config_path.empty()) {
    scenario = load_config(config_path, "", "").scenario;
  }
  if (svg && !scenario) {
    throw ConfigError("replay: --svg needs --config for the scene geometry");
  }
  if (!out_dir.empty()) {
    out_dir = resolve_out(out_dir);
    fs::create_directories(out_dir);
  }
  std::string line;
  int index = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const nlohmann::json step = nlohmann::json::parse(line);
    if (every > 1 && index % every != 0) {
      ++index;
      continue;
    }
    std::printf("%s\n", eval::step_summary(step).c_str());
    if (svg && !out_dir.empty()) {
      char name[64];
      std::snprintf(name, sizeof(name), "step%05d.svg", step.value("step", index));
      std::ofstream os((fs::path(out_dir) / name).string(), std::ios::trunc);
      os << eval::render_step_svg(step, *scenario);
    }
    ++index;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"occluded-driving V2V experiments"};
  app.require_subcommand(1);

  std::string config_path, scenario_path, variant, out_dir = "out";
  std::string checkpoint, rates_csv, preset, out_file, trace_path;
  std::uint64_t seed_u = 0;
  std::int64_t seed_s = -1;
  int episodes = -1;
  double dropout = 0.0;
  bool use_ttc = false, traces = false, ledger = false, svg = false;
  int every = 1;

  auto* train = app.add_subcommand("train", "train a policy");
  train->add_option("--config", config_path, "experiment config JSON")->required();
  train->add_option("--scenario", scenario_path, "scenario JSON override");
  train->add_option("--variant", variant,
                    "collaborative|independent|ground_truth|early_fusion");
  train->add_option("--out", out_dir, "output directory");
  train->add_option("--seed", seed_u, "root seed override");
  train->add_option("--episodes", episodes, "episode count override");

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint or the rule-based baseline");
  ev->add_option("--config", config_path, "experiment config JSON")->required();
  ev->add_option("--scenario", scenario_path, "scenario JSON override");
  ev->add_option("--variant", variant, "observation variant");
  ev->add_option("--checkpoint", checkpoint, "policy checkpoint");
  ev->add_flag("--ttc", use_ttc, "evaluate the rule-based baseline instead");
  ev->add_option("--episodes", episodes, "episode count");
  ev->add_option("--seed", seed_s, "evaluation seed");
  ev->add_option("--dropout", dropout, "point dropout rate");
  ev->add_flag("--traces", traces, "write per-episode trace logs");
  ev->add_flag("--ledger", ledger, "write the per-step bandwidth ledger");
  ev->add_option("--out", out_dir, "output directory");

  auto* sw = app.add_subcommand("sweep", "dropout resilience sweep on a checkpoint");
  sw->add_option("--config", config_path, "experiment config JSON")->required();
  sw->add_option("--scenario", scenario_path, "scenario JSON override");
  sw->add_option("--variant", variant, "observation variant");
  sw->add_option("--checkpoint", checkpoint, "policy checkpoint")->required();
  sw->add_option("--rates", rates_csv, "comma-separated dropout rates");
  sw->add_option("--episodes", episodes, "episodes per rate");
  sw->add_option("--seed", seed_s, "evaluation seed");
  sw->add_option("--out", out_dir, "output directory");

  auto* bw = app.add_subcommand("bandwidth", "print the bandwidth ledger for a config");
  bw->add_option("--config", config_path, "experiment config JSON");
  bw->add_option("--preset", preset, "paper-scale or desk-scale");
  bw->add_option("--out", out_file, "also write the report to this file");

  auto* rp = app.add_subcommand("replay", "render an episode trace");
  rp->add_option("--trace", trace_path, "episode trace .jsonl")->required();
  rp->add_option("--config", config_path, "config for scene geometry");
  rp->add_option("--out", out_dir, "output directory for SVG frames");
  rp->add_flag("--svg", svg, "write one SVG per step");
  rp->add_option("--every", every, "render every Nth step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (train->parsed()) {
      return run_train(config_path, scenario_path, variant, out_dir, seed_u, episodes);
    }
    if (ev->parsed()) {
      return run_eval(config_path, scenario_path, variant, checkpoint, use_ttc,
                      out_dir, episodes, seed_s, dropout, traces, ledger);
    }
    if (sw->parsed()) {
      return run_sweep(config_path, scenario_path, variant, checkpoint, out_dir,
                       rates_csv, episodes, seed_s);
    }
    if (bw->parsed()) {
      return run_bandwidth(config_path, preset, out_file);
    }
    if (rp->parsed()) {
      return run_replay(trace_path, config_path, out_dir, svg, every);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
