#include "ovml/eval/metrics.hpp"

#include <cmath>

#include "ovml/util/text.hpp"

namespace ovml::eval {

using mappo::EpisodeOutcome;
using mappo::EpisodeStats;

EvalMetrics aggregate_metrics(std::span<const EpisodeStats> episodes) {
  EvalMetrics m;
  m.n_episodes = static_cast<int>(episodes.size());
  if (episodes.empty()) return m;

  double rsum = 0.0, ssum = 0.0;
  int collisions = 0, successes = 0, timeouts = 0;
  for (const EpisodeStats& e : episodes) {
    rsum += e.shared_return;
    ssum += e.mean_speed_kmh;
    switch (e.outcome) {
      case EpisodeOutcome::Collision: ++collisions; break;
      case EpisodeOutcome::Success: ++successes; break;
      case EpisodeOutcome::Timeout: ++timeouts; break;
    }
  }
  const double n = static_cast<double>(episodes.size());
  m.avg_reward_mean = rsum / n;
  m.avg_speed_mean = ssum / n;
  double rvar = 0.0, svar = 0.0;
  for (const EpisodeStats& e : episodes) {
    rvar += (e.shared_return - m.avg_reward_mean) * (e.shared_return - m.avg_reward_mean);
    svar += (e.mean_speed_kmh - m.avg_speed_mean) * (e.mean_speed_kmh - m.avg_speed_mean);
  }
  m.avg_reward_std = std::sqrt(rvar / n);
  m.avg_speed_std = std::sqrt(svar / n);
  m.collision_rate_pct = 100.0 * collisions / n;
  m.success_rate_pct = 100.0 * successes / n;
  m.timeout_rate_pct = 100.0 * timeouts / n;
  return m;
}

std::string metrics_csv_header() {
  return "variant,scenario,episodes,seed,dropout_rate,avg_reward_mean,avg_reward_std,"
         "avg_speed_mean,avg_speed_std,collision_rate_pct,success_rate_pct,"
         "timeout_rate_pct";
}

std::string metrics_csv_row(const std::string& variant, const std::string& scenario,
                            std::uint64_t seed, double dropout_rate,
                            const EvalMetrics& m) {
  using util::fmt_f;
  std::string row = variant + "," + scenario + "," + std::to_string(m.n_episodes) +
                    "," + std::to_string(seed) + "," + fmt_f(dropout_rate, 2);
  for (double v : {m.avg_reward_mean, m.avg_reward_std, m.avg_speed_mean,
                   m.avg_speed_std, m.collision_rate_pct, m.success_rate_pct,
                   m.timeout_rate_pct}) {
    row += "," + fmt_f(v);
  }
  return row;
}

std::string ledger_csv_header() { return "step,sender,bytes,mbps,budget_pass"; }

std::string ledger_csv_row(const mappo::BandwidthRow& row) {
  return std::to_string(row.step) + "," + std::to_string(row.sender) + "," +
         std::to_string(row.bytes) + "," + util::fmt_f(row.mbps) + "," +
         (row.budget_pass ? "1" : "0");
}

}  // namespace ovml::eval
