#include "ovml/mappo/rollout.hpp"

#include <cmath>

#include "ovml/grad/distributions.hpp"
#include "ovml/util/text.hpp"
#include "ovml/world/trace.hpp"

namespace ovml::mappo {

using baselines::ObservationVariant;
using grad::Tensor;
using world::Action;

namespace {

Tensor to_tensor(const std::vector<double>& v) {
  return Tensor::from_data(v, {static_cast<int>(v.size())});
}

Tensor critic_input(const std::vector<double>& state, const Tensor& hs) {
  std::vector<double> buf;
  buf.reserve(state.size() + static_cast<std::size_t>(hs.numel()));
  buf.insert(buf.end(), state.begin(), state.end());
  auto h = hs.value();
  buf.insert(buf.end(), h.begin(), h.end());
  return to_tensor(buf);
}

}  // namespace

EpisodeData collect_episode(const world::ScenarioConfig& cfg, const PolicySet& policy,
                            const comms::ChannelModel& channel,
                            const CollectOptions& opts, std::uint64_t env_seed,
                            std::uint64_t action_seed, std::uint64_t dropout_seed) {
  const int n = cfg.n_cavs();
  EpisodeData out;
  out.agents.resize(static_cast<std::size_t>(n));

  world::World env(cfg, env_seed);
  world::StepResult res = env.reset();
  util::Rng action_rng(action_seed);
  util::Rng dropout_rng(dropout_seed);

  const bool use_messages = opts.variant == ObservationVariant::Collaborative ||
                            opts.variant == ObservationVariant::GroundTruth;

  double speed_accum = 0.0;
  double entropy_accum = 0.0;
  int entropy_count = 0;

  while (!env.done()) {
    // dropout hits every sensing path, shared messages included
    std::vector<lidar::LidarScan> scans = std::move(res.scans);
    if (opts.dropout_rate > 0.0) {
      for (auto& s : scans) s = lidar::apply_dropout(s, opts.dropout_rate, dropout_rng);
    }

    std::vector<baselines::ObsBundle> bundles;
    bundles.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      bundles.push_back(
          baselines::build_observation(opts.variant, env, k, scans, channel));
    }

    // per-vehicle features and the message pool for this step
    std::vector<Tensor> ego_feats(static_cast<std::size_t>(n));
    std::vector<comms::FeatureMessage> pool;
    for (int k = 0; k < n; ++k) {
      ego_feats[static_cast<std::size_t>(k)] =
          policy.encoder.forward(nullptr, bundles[static_cast<std::size_t>(k)].bev);
      if (use_messages && env.vehicle(k).active) {
        pool.push_back(comms::make_message(k, env.step_index(), env.vehicle(k).pose,
                                           ego_feats[static_cast<std::size_t>(k)]));
      }
    }
    if (opts.want_ledger) {
      for (const auto& m : pool) {
        BandwidthRow row;
        row.step = env.step_index();
        row.sender = static_cast<int>(m.sender_id);
        row.bytes = m.wire_size();
        row.mbps = comms::bandwidth_mbps(row.bytes, channel.fps);
        row.budget_pass = comms::budget_check(row.mbps, channel.budgets.dsrc_mbps);
        out.ledger.push_back(row);
      }
    }

    std::vector<Action> actions(static_cast<std::size_t>(n), Action::NoOp);
    std::vector<Transition> pending(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      std::vector<std::pair<int, Tensor>> aligned;
      if (use_messages) {
        std::vector<comms::FeatureMessage> others;
        for (const auto& m : pool) {
          if (static_cast<int>(m.sender_id) != k) others.push_back(m);
        }
        for (const auto& m : comms::deliver(others, k, env, channel)) {
          aligned.emplace_back(static_cast<int>(m.sender_id),
                               comms::align_to_receiver(m, env.vehicle(k).pose,
                                                        cfg.lidar.max_range));
        }
      }
      comms::AggregatedFeatures hs = comms::aggregate(
          nullptr, ego_feats[ku], k, aligned, opts.aggregation);

      Tensor meta = to_tensor(bundles[ku].meta);
      Tensor logits = policy.actor.forward(nullptr, hs.tensor, meta);
      if (!logits.all_finite()) {
        throw NumericError("actor produced non-finite logits at step " +
                           std::to_string(env.step_index()));
      }

      int act;
      double log_prob;
      if (opts.greedy) {
        act = grad::argmax(logits.value());
        log_prob = grad::log_softmax_at(logits.value(), act);
      } else {
        const auto s = grad::sample_categorical(logits.value(), action_rng);
        act = s.index;
        log_prob = s.log_prob;
      }
      actions[ku] = static_cast<Action>(act);
      entropy_accum += grad::entropy_nats(logits.value());
      ++entropy_count;

      if (opts.record_transitions) {
        Transition& t = pending[ku];
        t.bev = bundles[ku].bev;
        t.aligned = std::move(aligned);
        t.hs_const = hs.tensor;
        t.meta = std::move(bundles[ku].meta);
        t.state = std::move(bundles[ku].state);
        t.action = act;
        t.log_prob_old = log_prob;
        const double v_norm =
            policy.critic.forward(nullptr, critic_input(t.state, t.hs_const)).item();
        t.value_old_norm = v_norm;
        t.value_old_raw = policy.ret_norm.denormalize(v_norm);
      }
    }

    // mean speed over CAVs still driving, before they move
    {
      double s = 0.0;
      int driving = 0;
      for (int k = 0; k < n; ++k) {
        if (!env.vehicle(k).arrived) {
          s += env.vehicle(k).speed_kmh;
          ++driving;
        }
      }
      if (driving > 0) speed_accum += s / driving;
    }

    res = env.step(actions);
    out.stats.shared_return += res.shared_reward;
    ++out.stats.steps;
    if (opts.want_trace) {
      out.trace_lines.push_back(
          world::step_trace_json(env, env.step_index(), actions, res));
    }

    if (opts.record_transitions) {
      const bool terminal = res.done && res.reason != world::DoneReason::Timeout;
      for (int k = 0; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        Transition& t = pending[ku];
        t.reward = opts.per_agent_rewards ? res.agent_rewards[ku] : res.shared_reward;
        t.terminal = terminal;
        out.agents[ku].steps.push_back(std::move(t));
      }
    }
  }

  // timeout bootstraps with the critic's view of the state after the last
  // step; true terminals bootstrap zero
  if (opts.record_transitions && res.reason == world::DoneReason::Timeout) {
    std::vector<lidar::LidarScan> scans = std::move(res.scans);
    if (opts.dropout_rate > 0.0) {
      for (auto& s : scans) s = lidar::apply_dropout(s, opts.dropout_rate, dropout_rng);
    }
    std::vector<baselines::ObsBundle> bundles;
    std::vector<Tensor> ego_feats(static_cast<std::size_t>(n));
    std::vector<comms::FeatureMessage> pool;
    for (int k = 0; k < n; ++k) {
      bundles.push_back(
          baselines::build_observation(opts.variant, env, k, scans, channel));
      ego_feats[static_cast<std::size_t>(k)] =
          policy.encoder.forward(nullptr, bundles.back().bev);
      if (use_messages && env.vehicle(k).active) {
        pool.push_back(comms::make_message(k, env.step_index(), env.vehicle(k).pose,
                                           ego_feats[static_cast<std::size_t>(k)]));
      }
    }
    for (int k = 0; k < n; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      std::vector<std::pair<int, Tensor>> aligned;
      if (use_messages) {
        std::vector<comms::FeatureMessage> others;
        for (const auto& m : pool) {
          if (static_cast<int>(m.sender_id) != k) others.push_back(m);
        }
        for (const auto& m : comms::deliver(others, k, env, channel)) {
          aligned.emplace_back(static_cast<int>(m.sender_id),
                               comms::align_to_receiver(m, env.vehicle(k).pose,
                                                        cfg.lidar.max_range));
        }
      }
      comms::AggregatedFeatures hs =
          comms::aggregate(nullptr, ego_feats[ku], k, aligned, opts.aggregation);
      const double v_norm =
          policy.critic.forward(nullptr, critic_input(bundles[ku].state, hs.tensor))
              .item();
      out.agents[ku].bootstrap_value_raw = policy.ret_norm.denormalize(v_norm);
    }
  }

  switch (res.reason) {
    case world::DoneReason::Collision: out.stats.outcome = EpisodeOutcome::Collision; break;
    case world::DoneReason::AllArrived: out.stats.outcome = EpisodeOutcome::Success; break;
    default: out.stats.outcome = EpisodeOutcome::Timeout; break;
  }
  out.stats.mean_speed_kmh = out.stats.steps > 0 ? speed_accum / out.stats.steps : 0.0;
  out.stats.mean_entropy = entropy_count > 0 ? entropy_accum / entropy_count : 0.0;
  return out;
}

}  // namespace ovml::mappo
