#include "ovml/eval/evaluate.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ovml/world/trace.hpp"

namespace ovml::eval {

namespace fs = std::filesystem;
using mappo::EpisodeData;
using mappo::EpisodeOutcome;
using mappo::EpisodeStats;

namespace {

void write_episode_outputs(const EvalRequest& req, int episode_index,
                           const EpisodeData& data) {
  if (req.trace_dir) {
    fs::create_directories(*req.trace_dir);
    char name[64];
    std::snprintf(name, sizeof(name), "episode%05d.jsonl", episode_index);
    world::write_trace((fs::path(*req.trace_dir) / name).string(), data.trace_lines);
  }
}

EvalMetrics finalize(const EvalRequest& req, std::vector<EpisodeData>& episodes,
                     std::vector<EpisodeStats>* out_episodes) {
  std::vector<EpisodeStats> stats;
  stats.reserve(episodes.size());
  for (int i = 0; i < static_cast<int>(episodes.size()); ++i) {
    stats.push_back(episodes[static_cast<std::size_t>(i)].stats);
    write_episode_outputs(req, i, episodes[static_cast<std::size_t>(i)]);
  }
  if (req.ledger_path) {
    std::ofstream os(*req.ledger_path, std::ios::trunc);
    os << ledger_csv_header() << '\n';
    for (const auto& e : episodes) {
      for (const auto& row : e.ledger) os << ledger_csv_row(row) << '\n';
    }
  }
  if (out_episodes) *out_episodes = stats;
  return aggregate_metrics(stats);
}

}  // namespace

EvalMetrics evaluate_policy(const world::ScenarioConfig& scenario,
                            const mappo::PolicySet& policy,
                            baselines::ObservationVariant variant,
                            const comms::ChannelModel& channel,
                            comms::Aggregation aggregation, const EvalRequest& req,
                            std::vector<EpisodeStats>* out_episodes) {
  if (req.n_episodes < 1) throw ContractError("evaluate: n_episodes must be >= 1");
  mappo::CollectOptions opts;
  opts.variant = variant;
  opts.aggregation = aggregation;
  opts.dropout_rate = req.dropout_rate;
  opts.greedy = true;  // no exploration at test time
  opts.record_transitions = false;
  opts.want_ledger = req.ledger_path.has_value();
  opts.want_trace = req.trace_dir.has_value();

  std::vector<EpisodeData> episodes(static_cast<std::size_t>(req.n_episodes));
#pragma omp parallel for schedule(dynamic, 1) if (req.parallel)
  for (int e = 0; e < req.n_episodes; ++e) {
    const auto idx = static_cast<std::uint64_t>(e);
    episodes[static_cast<std::size_t>(e)] = mappo::collect_episode(
        scenario, policy, channel, opts,
        util::derive_seed(req.seed, util::Stream::EnvReset, idx),
        util::derive_seed(req.seed, util::Stream::ActionSample, idx),
        util::derive_seed(req.seed, util::Stream::Dropout, idx));
  }
  return finalize(req, episodes, out_episodes);
}

EvalMetrics evaluate_ttc(const world::ScenarioConfig& scenario,
                         const baselines::TtcParams& params, const EvalRequest& req,
                         std::vector<EpisodeStats>* out_episodes) {
  if (req.n_episodes < 1) throw ContractError("evaluate: n_episodes must be >= 1");
  const baselines::TtcController controller(scenario, params);

  std::vector<EpisodeData> episodes(static_cast<std::size_t>(req.n_episodes));
#pragma omp parallel for schedule(dynamic, 1) if (req.parallel)
  for (int e = 0; e < req.n_episodes; ++e) {
    world::World env(scenario,
                     util::derive_seed(req.seed, util::Stream::EnvReset,
                                       static_cast<std::uint64_t>(e)));
    world::StepResult res = env.reset();
    EpisodeData data;
    double speed_accum = 0.0;
    while (!env.done()) {
      const auto actions = controller.act(env);
      double s = 0.0;
      int driving = 0;
      for (int k = 0; k < env.n_cavs(); ++k) {
        if (!env.vehicle(k).arrived) {
          s += env.vehicle(k).speed_kmh;
          ++driving;
        }
      }
      if (driving > 0) speed_accum += s / driving;
      res = env.step(actions);
      data.stats.shared_return += res.shared_reward;
      ++data.stats.steps;
      if (req.trace_dir) {
        data.trace_lines.push_back(
            world::step_trace_json(env, env.step_index(), actions, res));
      }
    }
    switch (res.reason) {
      case world::DoneReason::Collision:
        data.stats.outcome = EpisodeOutcome::Collision;
        break;
      case world::DoneReason::AllArrived:
        data.stats.outcome = EpisodeOutcome::Success;
        break;
      default:
        data.stats.outcome = EpisodeOutcome::Timeout;
        break;
    }
    data.stats.mean_speed_kmh =
        data.stats.steps > 0 ? speed_accum / data.stats.steps : 0.0;
    episodes[static_cast<std::size_t>(e)] = std::move(data);
  }
  return finalize(req, episodes, out_episodes);
}

std::vector<SweepRow> dropout_sweep(const world::ScenarioConfig& scenario,
                                    const mappo::PolicySet& policy,
                                    baselines::ObservationVariant variant,
                                    const comms::ChannelModel& channel,
                                    comms::Aggregation aggregation,
                                    const std::vector<double>& rates,
                                    int episodes_per_rate, std::uint64_t seed) {
  for (std::size_t i = 1; i < rates.size(); ++i) {
    if (rates[i] <= rates[i - 1]) {
      throw ContractError("dropout sweep rates must be strictly increasing");
    }
  }
  std::vector<SweepRow> out;
  for (double rate : rates) {
    if (rate < 0.0 || rate > 1.0) {
      throw ContractError("dropout rate outside [0,1]");
    }
    EvalRequest req;
    req.n_episodes = episodes_per_rate;
    req.seed = seed;
    req.dropout_rate = rate;
    SweepRow row;
    row.dropout_rate = rate;
    row.metrics =
        evaluate_policy(scenario, policy, variant, channel, aggregation, req);
    out.push_back(row);
  }
  return out;
}

}  // namespace ovml::eval
