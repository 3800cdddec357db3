#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovml/baselines/observation.hpp"
#include "ovml/mappo/nets.hpp"

namespace ovml::mappo {

struct Transition {
  lidar::BevGrid bev;  // ego raster after any dropout
  // receiver-aligned neighbor features; constants during updates because
  // they crossed the quantized wire
  std::vector<std::pair<int, grad::Tensor>> aligned;
  grad::Tensor hs_const;  // collection-time aggregate, the critic's feature view
  std::vector<double> meta;
  std::vector<double> state;
  int action = 0;
  double log_prob_old = 0.0;
  double value_old_norm = 0.0;
  double value_old_raw = 0.0;
  double reward = 0.0;
  bool terminal = false;  // collision or all-arrived (not timeout)
};

struct AgentTrajectory {
  std::vector<Transition> steps;
  double bootstrap_value_raw = 0.0;  // value of the post-timeout state, 0 if terminal
};

enum class EpisodeOutcome { Collision, Success, Timeout };

struct BandwidthRow {
  int step = 0;
  int sender = 0;
  std::size_t bytes = 0;
  double mbps = 0.0;
  bool budget_pass = true;
};

struct EpisodeStats {
  double shared_return = 0.0;
  double mean_speed_kmh = 0.0;  // per-step mean over driving CAVs, then over steps
  double mean_entropy = 0.0;
  int steps = 0;
  EpisodeOutcome outcome = EpisodeOutcome::Timeout;
};

struct EpisodeData {
  std::vector<AgentTrajectory> agents;
  EpisodeStats stats;
  std::vector<BandwidthRow> ledger;
  std::vector<std::string> trace_lines;  // one JSON object per step
};

struct CollectOptions {
  baselines::ObservationVariant variant =
      baselines::ObservationVariant::Collaborative;
  comms::Aggregation aggregation = comms::Aggregation::Max;
  double dropout_rate = 0.0;
  bool greedy = false;              // argmax actions (test time)
  bool record_transitions = true;   // off for plain evaluation
  bool want_ledger = false;
  bool want_trace = false;
  bool per_agent_rewards = false;   // independent training signal
};

// One full episode through the sensing / sharing / acting pipeline per
// step: raycast -> dropout -> rasterize -> encode -> compress -> deliver ->
// align -> aggregate -> actor. Parameters are read-only throughout.
EpisodeData collect_episode(const world::ScenarioConfig& cfg, const PolicySet& policy,
                            const comms::ChannelModel& channel,
                            const CollectOptions& opts, std::uint64_t env_seed,
                            std::uint64_t action_seed, std::uint64_t dropout_seed);

}  // namespace ovml::mappo
