// End-to-end acceptance suite: one pass/fail line per criterion, nonzero
// exit if any fail. Criteria 8-10 train policies on the bundled desk-scale
// intersection and take the bulk of the runtime.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ovml/eval/config.hpp"
#include "ovml/eval/evaluate.hpp"
#include "ovml/grad/adam.hpp"
#include "ovml/grad/ops.hpp"
#include "ovml/lidar/lidar.hpp"
#include "ovml/mappo/gae.hpp"
#include "ovml/mappo/losses.hpp"
#include "ovml/mappo/trainer.hpp"
#include "ovml/util/text.hpp"
#include "ovml/world/world.hpp"

namespace fs = std::filesystem;
using namespace ovml;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kConfigDir = OVML_CONFIG_DIR;

int g_failures = 0;

void verdict(int criterion, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string run_command(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return out;
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe)) out += buf;
  pclose(pipe);
  return out;
}

int run_command_status(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

std::string file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- 1
void criterion_bandwidth(const std::string& cli) {
  const auto t0 = Clock::now();
  const std::string out = run_command(cli + " bandwidth --preset paper-scale");
  const double elapsed = seconds_since(t0);
  double compressed = -1.0;
  bool dsrc_pass = false, cv2x_pass = false;
  std::stringstream ss(out);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("compressed:", 0) == 0) {
      compressed = std::atof(line.c_str() + 11);
    }
    if (line.find("DSRC") != std::string::npos &&
        line.find("pass") != std::string::npos) {
      dsrc_pass = true;
    }
    if (line.find("C-V2X") != std::string::npos &&
        line.find("pass") != std::string::npos) {
      cv2x_pass = true;
    }
  }
  const bool value_ok = std::abs(compressed - 1.0755) < 5e-4 &&
                        std::abs(compressed - 1.075) / 1.075 < 0.01;
  const bool ok = value_ok && dsrc_pass && cv2x_pass && elapsed < 1.0;
  verdict(1, ok,
          "bandwidth preset paper-scale -> " + util::fmt_f(compressed, 4) +
              " Mbps, DSRC " + (dsrc_pass ? "pass" : "fail") + ", C-V2X " +
              (cv2x_pass ? "pass" : "fail") + ", " + util::fmt_f(elapsed, 2) + " s");
}

// ---------------------------------------------------------------- 2
void criterion_reward() {
  const bool ok = world::reward_value(1, 0, 0, 1) == -5.01 &&
                  world::reward_value(0, 0, 0, 1) == -0.01 &&
                  world::reward_value(0, 0.5, 1, 1) == 5.49;
  verdict(2, ok, "reward fixtures -5.01 / -0.01 / 5.49 reproduced exactly");
}

// ---------------------------------------------------------------- 3
struct FdCheck {
  double worst_rel = 0.0;
  int checked = 0;
  bool ok = true;
};

void fd_check(FdCheck& acc, const std::function<grad::Tensor(grad::Tape*)>& build,
              grad::Tensor param) {
  param.zero_grad();
  grad::Tape tape;
  grad::Tensor loss = build(&tape);
  tape.backward(loss);
  const std::vector<double> analytic(param.grad().begin(), param.grad().end());
  auto vals = param.value();
  const double h = 1e-5;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double saved = vals[i];
    vals[i] = saved + h;
    const double up = build(nullptr).item();
    vals[i] = saved - h;
    const double dn = build(nullptr).item();
    vals[i] = saved;
    const double fd = (up - dn) / (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(analytic[i]), 1e-6});
    const double rel = std::abs(fd - analytic[i]) / denom;
    acc.worst_rel = std::max(acc.worst_rel, rel);
    ++acc.checked;
    if (rel >= 1e-4) acc.ok = false;
  }
}

void criterion_gradients() {
  const auto t0 = Clock::now();
  util::Rng rng(2024);
  FdCheck acc;
  int shapes = 0;
  for (int round = 0; round < 56; ++round) {
    const int cin = rng.uniform_int(1, 3);
    const int cout = rng.uniform_int(1, 4);
    const int hw = rng.uniform_int(4, 9);
    const int k = rng.uniform_int(1, 3);
    const int stride = rng.uniform_int(1, 2);
    const int pad = rng.uniform_int(0, 1);
    if (k > hw + 2 * pad) continue;
    ++shapes;

    grad::Tensor x = grad::Tensor::uniform({cin, hw, hw}, -1, 1, rng);
    grad::Tensor cw = grad::Tensor::uniform({cout, cin, k, k}, -0.6, 0.6, rng, true);
    grad::Tensor cb = grad::Tensor::uniform({cout}, -0.2, 0.2, rng, true);
    const int oh = (hw + 2 * pad - k) / stride + 1;
    const int flat = cout * oh * oh;
    grad::Tensor w1 = grad::Tensor::uniform({6, flat}, -0.4, 0.4, rng, true);
    grad::Tensor b1 = grad::Tensor::uniform({6}, -0.2, 0.2, rng, true);
    grad::Tensor w2 = grad::Tensor::uniform({5, 6}, -0.5, 0.5, rng, true);

    // network path: conv2d + bias, relu, flatten, linear x2, log_softmax,
    // pick, entropy -- everything the training graph uses
    const int pick_at = rng.uniform_int(0, 4);
    auto net = [&](grad::Tape* t) {
      grad::Tensor h = grad::relu(t, grad::conv2d(t, x, cw, cb, stride, pad));
      grad::Tensor f = grad::flatten(t, h);
      grad::Tensor d = grad::relu(t, grad::linear(t, f, w1, b1));
      grad::Tensor logits = grad::linear(t, d, w2, grad::Tensor());
      grad::Tensor lp = grad::pick(t, grad::log_softmax(t, logits), pick_at);
      grad::Tensor ent = grad::entropy_of_logits(t, logits);
      return grad::add(t, lp, grad::scale(t, ent, 0.1));
    };
    for (grad::Tensor p : {cw, cb, w1, b1, w2}) fd_check(acc, net, p);

    // elementwise chain: sub, mul, exp, square, min/max, clamp, softmax, mean
    const int n = rng.uniform_int(3, 10);
    grad::Tensor a = grad::Tensor::uniform({n}, 0.2, 1.0, rng, true);
    grad::Tensor b = grad::Tensor::uniform({n}, 1.3, 2.2, rng, true);
    grad::Tensor c = grad::Tensor::uniform({n}, -1, 1, rng);
    auto chain = [&](grad::Tape* t) {
      grad::Tensor m = grad::mul(t, grad::sub(t, b, a), c);
      grad::Tensor e = grad::exp_elem(t, grad::scale(t, a, 0.5));
      grad::Tensor q = grad::square(t, grad::max_elem(t, m, e));
      grad::Tensor lo = grad::min_elem(t, q, grad::clamp_const(t, b, 1.4, 2.1));
      std::vector<grad::Tensor> parts{lo, grad::softmax(t, a)};
      grad::Tensor cc = grad::concat(t, parts);
      return grad::add(t, grad::mean(t, cc), grad::sum(t, grad::add_const(t, a, 0.1)));
    };
    fd_check(acc, chain, a);
    fd_check(acc, chain, b);
  }
  const double elapsed = seconds_since(t0);
  const bool ok = acc.ok && shapes >= 50 && elapsed < 120.0;
  verdict(3, ok,
          "finite differences over " + std::to_string(shapes) + " shapes, " +
              std::to_string(acc.checked) + " partials, worst rel " +
              util::fmt_f(acc.worst_rel, 8) + ", " + util::fmt_f(elapsed, 1) + " s");
}

// ---------------------------------------------------------------- 4
void criterion_gae() {
  util::Rng rng(4242);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.uniform_int(1, 32);
    std::vector<double> r(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> d(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      r[static_cast<std::size_t>(i)] = rng.uniform(-3, 3);
      v[static_cast<std::size_t>(i)] = rng.uniform(-3, 3);
    }
    const bool terminal = rng.bernoulli(0.5);
    d.back() = terminal ? 1 : 0;
    const double bootstrap = terminal ? 0.0 : rng.uniform(-3, 3);
    const double gamma = rng.uniform(0.9, 1.0);
    const double lambda = rng.uniform(0.8, 1.0);
    const auto fast = mappo::compute_gae(r, v, d, bootstrap, gamma, lambda);
    // explicit gamma-lambda weighted summation
    for (int t = 0; t < n; ++t) {
      double adv = 0.0, w = 1.0;
      for (int l = t; l < n; ++l) {
        const double next_v = (l + 1 < n) ? v[static_cast<std::size_t>(l + 1)] : bootstrap;
        const double not_done = d[static_cast<std::size_t>(l)] ? 0.0 : 1.0;
        adv += w * (r[static_cast<std::size_t>(l)] + gamma * next_v * not_done -
                    v[static_cast<std::size_t>(l)]);
        if (d[static_cast<std::size_t>(l)]) break;
        w *= gamma * lambda;
      }
      worst = std::max(worst, std::abs(adv - fast.advantages[static_cast<std::size_t>(t)]));
    }
  }
  verdict(4, worst < 1e-10,
          "recursive vs summed advantages over 1000 sequences, worst gap " +
              util::fmt_f(worst, 14));
}

// ---------------------------------------------------------------- 5
void criterion_loss_fixtures() {
  const bool ok = mappo::clipped_surrogate(1.5, 2.0, 0.2) == 2.4 &&
                  mappo::clipped_surrogate(0.5, -1.0, 0.2) == -0.8 &&
                  mappo::clipped_surrogate(1.0, 1.0, 0.2) == 1.0 &&
                  mappo::clipped_value_loss(2.0, 1.0, 0.0, 0.2) == 4.0 &&
                  mappo::clipped_value_loss(0.5, 1.0, 2.0, 0.2) == 2.25;
  verdict(5, ok, "clipped actor (2.4 / -0.8 / 1.0) and critic (4.0 / 2.25) fixtures");
}

// ---------------------------------------------------------------- 6
void criterion_occlusion() {
  util::Rng rng(606);
  int worlds = 0;
  int rays_checked = 0;
  bool ok = true;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    world::ScenarioConfig cfg;
    cfg.name = "random-world";
    cfg.max_steps = 5;
    cfg.routes.emplace_back(std::vector<world::Vec2>{{0, 0}, {200, 0}});
    cfg.routes.emplace_back(std::vector<world::Vec2>{{0, -500}, {200, -500}});
    cfg.route_lane_ids = {0, 1};
    cfg.occluders.push_back(
        world::Polygon{{{-20, -420}, {220, -420}, {220, -410}, {-20, -410}}});
    world::SpawnSpec ego;
    ego.route = 0;
    ego.progress = {0, 0};
    ego.speed_kmh = {10, 10};
    world::SpawnSpec other = ego;
    other.progress = {rng.uniform(8, 45), 0};
    other.progress.hi = other.progress.lo;
    cfg.cav_spawns = {ego, other};
    world::SpawnSpec traffic;
    traffic.route = 0;
    traffic.progress = {rng.uniform(8, 45), 0};
    traffic.progress.hi = traffic.progress.lo;
    traffic.speed_kmh = {10, 10};
    cfg.traffic_spawns = {traffic};
    for (int b = 0; b < rng.uniform_int(1, 3); ++b) {
      const double bx = rng.uniform(4, 40);
      const double by = rng.uniform(-12, 8);
      cfg.occluders.push_back(world::Polygon{{{bx, by},
                                              {bx + rng.uniform(0.5, 6), by + rng.uniform(-2, 2)},
                                              {bx + rng.uniform(0.5, 5), by + rng.uniform(1, 5)}}});
    }
    cfg.lidar.channels = 2;
    cfg.lidar.points_per_second = 2.0 * 480 * 20;
    world::World w(cfg, static_cast<std::uint64_t>(trial));
    try {
      w.reset();
    } catch (const ConfigError&) {
      continue;  // overlapping random spawns, skip this draw
    }
    ++worlds;
    const lidar::LidarScan scan = lidar::raycast_scan(w, 0, cfg.lidar, cfg.fps());

    // fresh nearest-hit oracle over every surface segment
    std::vector<world::Segment> segs;
    for (const auto& v : w.vehicles()) {
      if (v.id == 0 || !v.active) continue;
      const auto c = world::rect_corners(v.pose, v.length, v.width);
      for (int i = 0; i < 4; ++i) segs.push_back({c[i], c[(i + 1) % 4]});
    }
    for (const auto& occ : cfg.occluders) {
      for (const auto& e : occ.edges()) segs.push_back(e);
    }
    const world::Vec2 origin = w.vehicle(0).pose.position();
    const int n_az = 480;
    std::size_t pi = 0;
    for (int j = 0; j < n_az && ok; ++j) {
      const double az = w.vehicle(0).pose.heading + 2.0 * M_PI * j / n_az;
      const world::Vec2 dir{std::cos(az), std::sin(az)};
      double best = std::numeric_limits<double>::infinity();
      for (const auto& s : segs) {
        const world::Vec2 e = s.b - s.a;
        const double den = dir.x * e.y - dir.y * e.x;
        if (std::abs(den) < 1e-15) continue;
        const double t = ((s.a.x - origin.x) * e.y - (s.a.y - origin.y) * e.x) / den;
        const double u = ((s.a.x - origin.x) * dir.y - (s.a.y - origin.y) * dir.x) / den;
        if (t >= 0 && u >= 0 && u <= 1 && t < best) best = t;
      }
      ++rays_checked;
      if (best <= cfg.lidar.max_range) {
        for (int c = 0; c < cfg.lidar.channels && ok; ++c) {
          if (pi >= scan.points.size()) {
            ok = false;
            break;
          }
          const auto& p = scan.points[pi++];
          if (std::abs(std::hypot(p.x, p.y) - best) > 1e-9) ok = false;
        }
      }
    }
    if (pi != scan.points.size()) ok = false;  // a hidden surface leaked a point
  }
  verdict(6, ok && worlds >= 150,
          "nearest-hit oracle on " + std::to_string(worlds) + " random worlds, " +
              std::to_string(rays_checked) + " rays, point-for-point match");
}

// ---------------------------------------------------------------- 7
void criterion_codec() {
  util::Rng rng(707);
  bool ok = true;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double lo = rng.uniform(-8, 2);
    const double hi = lo + rng.uniform(0.05, 12.0);
    grad::Tensor t = grad::Tensor::uniform({4, 8, 8}, lo, hi, rng);
    const comms::QuantizedBlock b = comms::compress(t);
    const grad::Tensor back = comms::decompress(b);
    for (std::int64_t i = 0; i < t.numel(); ++i) {
      const double err = std::abs(back.value()[i] - t.value()[i]);
      const double bound = 0.5 * b.scale + 1e-12;
      worst_ratio = std::max(worst_ratio, b.scale > 0 ? err / (0.5 * b.scale) : 0.0);
      if (err > bound) ok = false;
    }
    // wire round trip must be byte-exact
    comms::FeatureMessage m;
    m.sender_id = static_cast<std::uint32_t>(trial);
    m.step = 9;
    m.pose_x = 1.5f;
    m.pose_y = -2.5f;
    m.pose_heading = 0.25f;
    m.payload = b;
    const auto bytes = comms::serialize(m);
    const auto bytes2 = comms::serialize(comms::deserialize(bytes));
    if (bytes != bytes2) ok = false;
  }
  verdict(7, ok,
          "quantizer error <= scale/2 on 100 tensors (worst " +
              util::fmt_f(worst_ratio, 4) + " of bound), wire round-trip byte-exact");
}

// ---------------------------------------------------------------- 8 + 9
struct TrainedMethod {
  std::string name;
  eval::EvalMetrics metrics;
  std::string checkpoint;
  double train_minutes = 0.0;
  int episodes = 0;
};

TrainedMethod train_and_eval(const eval::ExperimentConfig& base,
                             baselines::ObservationVariant variant,
                             const std::string& name, const fs::path& work) {
  TrainedMethod out;
  out.name = name;
  const auto t0 = Clock::now();
  const mappo::TrainResult tr =
      mappo::train(base.scenario, base.train, base.channel, variant,
                   (work / name).string(), base.root_seed);
  out.train_minutes = seconds_since(t0) / 60.0;
  out.checkpoint = tr.checkpoint_path;
  out.episodes = tr.episodes_run;
  const mappo::PolicySet policy =
      mappo::load_policy(tr.checkpoint_path, base.scenario, base.train, variant);
  eval::EvalRequest req;
  req.n_episodes = base.eval.episodes;
  req.seed = base.eval.seed;
  out.metrics = eval::evaluate_policy(
      base.scenario, policy, variant, base.channel,
      comms::aggregation_from_string(base.train.aggregation), req);
  std::printf(
      "    %-13s trained %4d eps in %5.1f min -> collision %5.1f%%  success %5.1f%%  "
      "reward %7.2f\n",
      name.c_str(), out.episodes, out.train_minutes, out.metrics.collision_rate_pct,
      out.metrics.success_rate_pct, out.metrics.avg_reward_mean);
  std::fflush(stdout);
  return out;
}

void criteria_training(const fs::path& work) {
  const eval::ExperimentConfig cfg =
      eval::ExperimentConfig::from_file(kConfigDir + "/desk_intersection.json");

  const TrainedMethod collab = train_and_eval(
      cfg, baselines::ObservationVariant::Collaborative, "collaborative", work);
  const TrainedMethod indep = train_and_eval(
      cfg, baselines::ObservationVariant::Independent, "independent", work);
  const TrainedMethod gt = train_and_eval(
      cfg, baselines::ObservationVariant::GroundTruth, "ground_truth", work);

  eval::EvalRequest req;
  req.n_episodes = cfg.eval.episodes;
  req.seed = cfg.eval.seed;
  const eval::EvalMetrics ttc = eval::evaluate_ttc(cfg.scenario, cfg.eval.ttc, req);
  std::printf("    %-13s rule-based           -> collision %5.1f%%  success %5.1f%%  "
              "reward %7.2f\n",
              "ttc", ttc.collision_rate_pct, ttc.success_rate_pct, ttc.avg_reward_mean);

  const bool budget_ok = collab.episodes <= 2000 && indep.episodes <= 2000 &&
                         gt.episodes <= 2000 && collab.train_minutes <= 60.0 &&
                         indep.train_minutes <= 60.0 && gt.train_minutes <= 60.0;
  const double margin1 = indep.metrics.collision_rate_pct -
                         collab.metrics.collision_rate_pct;
  const double margin2 = ttc.collision_rate_pct - indep.metrics.collision_rate_pct;
  const bool ordering_ok = margin1 >= 5.0 && margin2 >= 5.0;
  const bool gt_ok = gt.metrics.avg_reward_mean >= collab.metrics.avg_reward_mean;
  verdict(8, budget_ok && ordering_ok && gt_ok,
          "collision ordering collab " +
              util::fmt_f(collab.metrics.collision_rate_pct, 1) + "% < indep " +
              util::fmt_f(indep.metrics.collision_rate_pct, 1) + "% < ttc " +
              util::fmt_f(ttc.collision_rate_pct, 1) +
              "% (margins " + util::fmt_f(margin1, 1) + " / " + util::fmt_f(margin2, 1) +
              " pp), ground-truth reward " + util::fmt_f(gt.metrics.avg_reward_mean, 1) +
              " >= collaborative " + util::fmt_f(collab.metrics.avg_reward_mean, 1));

  // 9: dropout resilience on the trained collaborative checkpoint
  const mappo::PolicySet policy =
      mappo::load_policy(collab.checkpoint, cfg.scenario, cfg.train,
                         baselines::ObservationVariant::Collaborative);
  const auto rows = eval::dropout_sweep(
      cfg.scenario, policy, baselines::ObservationVariant::Collaborative, cfg.channel,
      comms::aggregation_from_string(cfg.train.aggregation), cfg.eval.dropout_rates,
      cfg.eval.episodes, cfg.eval.seed);
  double s0 = -1, s20 = -1, s40 = -1;
  for (const auto& row : rows) {
    std::printf("    dropout %.2f -> success %5.1f%%  collision %5.1f%%\n",
                row.dropout_rate, row.metrics.success_rate_pct,
                row.metrics.collision_rate_pct);
    if (row.dropout_rate == 0.0) s0 = row.metrics.success_rate_pct;
    if (row.dropout_rate == 0.2) s20 = row.metrics.success_rate_pct;
    if (row.dropout_rate == 0.4) s40 = row.metrics.success_rate_pct;
  }
  const bool shape_ok = s0 >= 0 && s20 >= 0 && s40 >= 0 &&
                        std::abs(s20 - s0) <= 10.0 && s40 < s20;
  verdict(9, shape_ok,
          "dropout sweep success " + util::fmt_f(s0, 1) + "% @0.0, " +
              util::fmt_f(s20, 1) + "% @0.2 (within 10 pp), " + util::fmt_f(s40, 1) +
              "% @0.4 (strictly below)");
}

// ---------------------------------------------------------------- 10
void criterion_determinism(const std::string& cli, const fs::path& work) {
  const std::string smoke = kConfigDir + "/smoke.json";
  auto run_once = [&](const std::string& dir) {
    const std::string train_cmd = cli + " train --config " + smoke + " --out " + dir;
    if (run_command_status(train_cmd) != 0) return false;
    const std::string eval_cmd = cli + " eval --config " + smoke + " --checkpoint " +
                                 dir + "/checkpoints/ep000020.ovml --episodes 10 " +
                                 "--seed 7 --out " + dir;
    return run_command_status(eval_cmd) == 0;
  };
  const std::string d1 = (work / "smoke_a").string();
  const std::string d2 = (work / "smoke_b").string();
  fs::remove_all(d1);
  fs::remove_all(d2);
  const bool ran = run_once(d1) && run_once(d2);
  bool ok = ran;
  if (ran) {
    const std::string curve1 = file_bytes(d1 + "/learning_curve.csv");
    const std::string curve2 = file_bytes(d2 + "/learning_curve.csv");
    const std::string met1 = file_bytes(d1 + "/metrics.csv");
    const std::string met2 = file_bytes(d2 + "/metrics.csv");
    ok = !curve1.empty() && curve1 == curve2 && !met1.empty() && met1 == met2;
  }
  verdict(10, ok, ran ? "smoke train+eval repeated: learning-curve and metrics CSVs "
                        "byte-identical"
                      : "smoke train/eval command failed");
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = "./ovml";
  fs::path work = "acceptance_work";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) cli = argv[++i];
    if (arg == "--work" && i + 1 < argc) work = argv[++i];
    if (arg == "--only" && i + 1 < argc) {
      for (const std::string& tok : util::split(argv[++i], ',')) {
        only.insert(std::atoi(tok.c_str()));
      }
    }
  }
  fs::create_directories(work);
  auto want = [&](int n) { return only.empty() || only.count(n) > 0; };

  try {
    if (want(1)) criterion_bandwidth(cli);
    if (want(2)) criterion_reward();
    if (want(3)) criterion_gradients();
    if (want(4)) criterion_gae();
    if (want(5)) criterion_loss_fixtures();
    if (want(6)) criterion_occlusion();
    if (want(7)) criterion_codec();
    if (want(8) || want(9)) criteria_training(work);
    if (want(10)) criterion_determinism(cli, work);
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria failed\n", g_failures);
  return 1;
}
