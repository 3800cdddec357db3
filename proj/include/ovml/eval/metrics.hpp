#pragma once

#include <span>
#include <string>
#include <vector>

#include "ovml/mappo/rollout.hpp"

namespace ovml::eval {

// Table-style summary over evaluation episodes. Every episode lands in
// exactly one of {collision, success, timeout}; the rates sum to 100.
struct EvalMetrics {
  int n_episodes = 0;
  double avg_reward_mean = 0.0;
  double avg_reward_std = 0.0;
  double avg_speed_mean = 0.0;  // km/h, CAVs only
  double avg_speed_std = 0.0;
  double collision_rate_pct = 0.0;
  double success_rate_pct = 0.0;
  double timeout_rate_pct = 0.0;
};

EvalMetrics aggregate_metrics(std::span<const mappo::EpisodeStats> episodes);

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& variant, const std::string& scenario,
                            std::uint64_t seed, double dropout_rate,
                            const EvalMetrics& m);

std::string ledger_csv_header();
std::string ledger_csv_row(const mappo::BandwidthRow& row);

}  // namespace ovml::eval
