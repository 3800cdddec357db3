#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ovml/baselines/ttc.hpp"
#include "ovml/eval/metrics.hpp"
#include "ovml/mappo/trainer.hpp"

namespace ovml::eval {

struct EvalRequest {
  int n_episodes = 100;
  std::uint64_t seed = 7;
  double dropout_rate = 0.0;
  bool parallel = true;
  // when set, per-episode traces are written under this directory
  std::optional<std::string> trace_dir;
  // when set, the per-step bandwidth ledger CSV is written here
  std::optional<std::string> ledger_path;
};

// Greedy (argmax) evaluation of a trained policy; deterministic given the
// seed, regardless of worker parallelism (episodes fold in index order).
EvalMetrics evaluate_policy(const world::ScenarioConfig& scenario,
                            const mappo::PolicySet& policy,
                            baselines::ObservationVariant variant,
                            const comms::ChannelModel& channel,
                            comms::Aggregation aggregation, const EvalRequest& req,
                            std::vector<mappo::EpisodeStats>* out_episodes = nullptr);

// Rule-based baseline on the same scenarios. No sensing pipeline: the
// controller reads line-of-sight world state directly.
EvalMetrics evaluate_ttc(const world::ScenarioConfig& scenario,
                         const baselines::TtcParams& params, const EvalRequest& req,
                         std::vector<mappo::EpisodeStats>* out_episodes = nullptr);

struct SweepRow {
  double dropout_rate = 0.0;
  EvalMetrics metrics;
};

// Point-dropout resilience sweep on a trained checkpoint; one evaluation per
// rate with the dropout injected into every sensing path.
std::vector<SweepRow> dropout_sweep(const world::ScenarioConfig& scenario,
                                    const mappo::PolicySet& policy,
                                    baselines::ObservationVariant variant,
                                    const comms::ChannelModel& channel,
                                    comms::Aggregation aggregation,
                                    const std::vector<double>& rates,
                                    int episodes_per_rate, std::uint64_t seed);

}  // namespace ovml::eval
