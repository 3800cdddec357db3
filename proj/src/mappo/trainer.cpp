#include "ovml/mappo/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "ovml/grad/adam.hpp"
#include "ovml/mappo/gae.hpp"
#include "ovml/mappo/losses.hpp"
#include "ovml/util/text.hpp"

namespace ovml::mappo {

namespace fs = std::filesystem;
using baselines::ObsSchema;
using baselines::ObservationVariant;
using grad::Tape;
using grad::Tensor;

void TrainConfig::validate(const world::ScenarioConfig& scenario) const {
  const std::string p = "train";
  if (clip_epsilon <= 0.0 || clip_epsilon >= 1.0) {
    throw ConfigError(p + ".clip_epsilon: must be in (0,1)");
  }
  if (entropy_coef < 0.0) throw ConfigError(p + ".entropy_coef: must be >= 0");
  if (discount < 0.0 || discount > 1.0) throw ConfigError(p + ".discount: must be in [0,1]");
  if (gae_lambda < 0.0 || gae_lambda > 1.0) {
    throw ConfigError(p + ".gae_lambda: must be in [0,1]");
  }
  if (minibatches <= 0) throw ConfigError(p + ".minibatches: must be > 0");
  if (batch_size <= 0 || batch_size % minibatches != 0) {
    throw ConfigError(p + ".batch_size: must be positive and divisible by minibatches");
  }
  if (epochs <= 0) throw ConfigError(p + ".epochs: must be > 0");
  if (episodes <= 0) throw ConfigError(p + ".episodes: must be > 0");
  if (rollout_workers <= 0) throw ConfigError(p + ".rollout_workers: must be > 0");
  if (encoder_hidden <= 0) throw ConfigError(p + ".encoder_hidden: must be > 0");
  if (feature_channels <= 0) throw ConfigError(p + ".feature_channels: must be > 0");
  if (batch_size != scenario.max_steps) {
    throw ConfigError(p + ".batch_size: must equal scenario.max_steps (" +
                      std::to_string(scenario.max_steps) + ")");
  }
  comms::aggregation_from_string(aggregation);  // throws on unknown values
}

namespace {

struct SampleRef {
  const Transition* t;
  double advantage;
  double ret_norm;
};

Tensor to_tensor(const std::vector<double>& v) {
  return Tensor::from_data(v, {static_cast<int>(v.size())});
}

}  // namespace

PolicySet make_policy(const world::ScenarioConfig& scenario, const TrainConfig& cfg,
                      ObservationVariant variant, std::uint64_t init_seed) {
  util::Rng rng(init_seed);
  const ObsSchema schema = ObsSchema::build(scenario, variant);
  PolicySet p;
  p.encoder = comms::EncoderNet::init(schema.bev_channels, cfg.encoder_hidden,
                                      cfg.feature_channels,
                                      scenario.lidar.occupancy_cap, rng);
  p.actor = ActorNet::init(cfg.feature_channels, schema.bev_cells, schema.meta_dim, rng);
  const int feat_flat = cfg.feature_channels * schema.bev_cells * schema.bev_cells;
  p.critic = CriticNet::init(schema.state_dim + feat_flat, rng);
  return p;
}

PolicySet load_policy(const std::string& checkpoint_path,
                      const world::ScenarioConfig& scenario, const TrainConfig& cfg,
                      ObservationVariant variant) {
  const ObsSchema schema = ObsSchema::build(scenario, variant);
  const grad::NamedTensors named = grad::load_checkpoint(checkpoint_path);
  return PolicySet::from_named(named, schema.bev_channels, cfg.encoder_hidden,
                               cfg.feature_channels, scenario.lidar.occupancy_cap,
                               schema.bev_cells, schema.meta_dim, schema.state_dim);
}

TrainResult train(const world::ScenarioConfig& scenario, const TrainConfig& cfg,
                  const comms::ChannelModel& channel, ObservationVariant variant,
                  const std::string& out_dir, std::uint64_t root_seed) {
  cfg.validate(scenario);
  fs::create_directories(out_dir);
  fs::create_directories(fs::path(out_dir) / "checkpoints");

  PolicySet policy = make_policy(
      scenario, cfg, variant, util::derive_seed(root_seed, util::Stream::PolicyInit));
  grad::Adam actor_opt(policy.actor_side_params(), {.lr = cfg.lr_actor});
  grad::Adam critic_opt(policy.critic_side_params(), {.lr = cfg.lr_critic});

  CollectOptions copts;
  copts.variant = variant;
  copts.aggregation = comms::aggregation_from_string(cfg.aggregation);
  copts.per_agent_rewards = variant == ObservationVariant::Independent;

  const std::string curve_path = (fs::path(out_dir) / "learning_curve.csv").string();
  std::ofstream curve(curve_path, std::ios::trunc);
  curve << "episode,mean_shared_reward,mean_entropy,actor_loss,critic_loss,collision_flag\n";

  TrainResult result;
  result.curve_path = curve_path;

  // last parameters that produced a finite update, restored on a NaN abort
  grad::NamedTensors last_good = policy.to_named();
  for (auto& [name, t] : last_good) t = t.clone();
  auto snapshot_good = [&]() {
    grad::NamedTensors named = policy.to_named();
    for (auto& [name, t] : named) t = t.clone();
    last_good = std::move(named);
  };
  auto restore_good = [&]() {
    grad::NamedTensors current = policy.to_named();
    for (std::size_t i = 0; i < current.size(); ++i) {
      auto dst = current[i].second.value();
      auto src = last_good[i].second.value();
      std::copy(src.begin(), src.end(), dst.begin());
    }
    policy.ret_norm.count = last_good.back().second.value()[0];
    policy.ret_norm.mean = last_good.back().second.value()[1];
    policy.ret_norm.m2 = last_good.back().second.value()[2];
  };

  auto save_checkpoint_at = [&](int episode) {
    char name[64];
    std::snprintf(name, sizeof(name), "ep%06d.ovml", episode);
    const std::string path = (fs::path(out_dir) / "checkpoints" / name).string();
    grad::save_checkpoint(path, policy.to_named());
    nlohmann::json manifest;
    manifest["checkpoint"] = path;
    manifest["episode"] = episode;
    manifest["variant"] = baselines::variant_to_string(variant);
    manifest["scenario"] = scenario.name;
    std::ofstream mf((fs::path(out_dir) / "latest.json").string(), std::ios::trunc);
    mf << manifest.dump(2) << "\n";
    result.checkpoint_path = path;
  };

  int ep = 0;
  int update_idx = 0;
  bool aborted = false;
  int next_checkpoint = cfg.checkpoint_interval;

  while (ep < cfg.episodes && !aborted) {
    const int w = std::min(cfg.rollout_workers, cfg.episodes - ep);
    std::vector<EpisodeData> episodes(static_cast<std::size_t>(w));

    // parameters are frozen during collection, so worker episodes are
    // independent given their seed streams; merge order is fixed by index
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < w; ++i) {
      const std::uint64_t idx = static_cast<std::uint64_t>(ep + i);
      episodes[static_cast<std::size_t>(i)] = collect_episode(
          scenario, policy, channel, copts,
          util::derive_seed(root_seed, util::Stream::EnvReset, idx),
          util::derive_seed(root_seed, util::Stream::ActionSample, idx),
          util::derive_seed(root_seed, util::Stream::Dropout, idx));
    }

    // GAE per agent trajectory, raw returns into the running normalizer
    std::vector<SampleRef> samples;
    std::vector<double> all_returns;
    for (EpisodeData& e : episodes) {
      for (AgentTrajectory& traj : e.agents) {
        std::vector<double> rewards, values;
        std::vector<std::uint8_t> dones;
        for (const Transition& t : traj.steps) {
          rewards.push_back(t.reward);
          values.push_back(t.value_old_raw);
          dones.push_back(t.terminal ? 1 : 0);
        }
        const GaeResult g = compute_gae(rewards, values, dones,
                                        traj.bootstrap_value_raw, cfg.discount,
                                        cfg.gae_lambda);
        for (std::size_t i = 0; i < traj.steps.size(); ++i) {
          samples.push_back({&traj.steps[i], g.advantages[i], g.returns[i]});
          all_returns.push_back(g.returns[i]);
        }
      }
    }
    if (samples.empty()) break;

    policy.ret_norm.update(all_returns);
    for (SampleRef& s : samples) s.ret_norm = policy.ret_norm.normalize(s.ret_norm);

    // batch-wide advantage normalization
    {
      std::vector<double> advs(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i) advs[i] = samples[i].advantage;
      normalize_advantages(advs);
      for (std::size_t i = 0; i < samples.size(); ++i) samples[i].advantage = advs[i];
    }

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);

    double last_actor_loss = 0.0;
    double last_critic_loss = 0.0;
    for (int epoch = 0; epoch < cfg.epochs && !aborted; ++epoch) {
      util::Rng shuffle_rng(util::derive_seed(
          root_seed, util::Stream::Shuffle,
          static_cast<std::uint64_t>(update_idx) * 131 + static_cast<std::uint64_t>(epoch)));
      for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(
            shuffle_rng.uniform() * static_cast<double>(i));
        std::swap(order[i - 1], order[j]);
      }
      const std::size_t chunk =
          (order.size() + static_cast<std::size_t>(cfg.minibatches) - 1) /
          static_cast<std::size_t>(cfg.minibatches);
      for (int mb = 0; mb < cfg.minibatches && !aborted; ++mb) {
        const std::size_t lo = static_cast<std::size_t>(mb) * chunk;
        const std::size_t hi = std::min(order.size(), lo + chunk);
        if (lo >= hi) continue;

        // actor + encoder pass
        Tape tape;
        std::vector<Tensor> surrogate_terms, entropy_terms;
        for (std::size_t oi = lo; oi < hi; ++oi) {
          const SampleRef& s = samples[order[oi]];
          Tensor feats = policy.encoder.forward(&tape, s.t->bev);
          comms::AggregatedFeatures hs =
              comms::aggregate(&tape, feats, 0, s.t->aligned, copts.aggregation);
          Tensor logits =
              policy.actor.forward(&tape, hs.tensor, to_tensor(s.t->meta));
          Tensor lp_new = grad::pick(&tape, grad::log_softmax(&tape, logits),
                                     s.t->action);
          surrogate_terms.push_back(surrogate_term(&tape, lp_new, s.t->log_prob_old,
                                                   s.advantage, cfg.clip_epsilon));
          entropy_terms.push_back(grad::entropy_of_logits(&tape, logits));
        }
        const double inv = 1.0 / static_cast<double>(surrogate_terms.size());
        Tensor surrogate = grad::scale(&tape, grad::sum_scalars(&tape, surrogate_terms), inv);
        Tensor entropy = grad::scale(&tape, grad::sum_scalars(&tape, entropy_terms), inv);
        Tensor objective =
            grad::add(&tape, surrogate, grad::scale(&tape, entropy, cfg.entropy_coef));
        Tensor actor_loss = grad::scale(&tape, objective, -1.0);
        const double actor_loss_v = actor_loss.item();
        if (!std::isfinite(actor_loss_v)) {
          aborted = true;
          break;
        }
        actor_opt.zero_grad();
        tape.backward(actor_loss);
        actor_opt.clip_grad_norm(cfg.max_grad_norm);
        actor_opt.step();
        last_actor_loss = actor_loss_v;

        // critic pass; features are collection-time constants
        Tape vtape;
        std::vector<Tensor> value_terms;
        for (std::size_t oi = lo; oi < hi; ++oi) {
          const SampleRef& s = samples[order[oi]];
          std::vector<double> buf;
          buf.reserve(s.t->state.size() +
                      static_cast<std::size_t>(s.t->hs_const.numel()));
          buf.insert(buf.end(), s.t->state.begin(), s.t->state.end());
          auto h = s.t->hs_const.value();
          buf.insert(buf.end(), h.begin(), h.end());
          Tensor v = policy.critic.forward(&vtape, to_tensor(buf));
          value_terms.push_back(value_loss_term(&vtape, v, s.t->value_old_norm,
                                                s.ret_norm, cfg.clip_epsilon));
        }
        Tensor critic_loss = grad::scale(
            &vtape, grad::sum_scalars(&vtape, value_terms),
            1.0 / static_cast<double>(value_terms.size()));
        const double critic_loss_v = critic_loss.item();
        if (!std::isfinite(critic_loss_v)) {
          aborted = true;
          break;
        }
        critic_opt.zero_grad();
        vtape.backward(critic_loss);
        critic_opt.clip_grad_norm(cfg.max_grad_norm);
        critic_opt.step();
        last_critic_loss = critic_loss_v;
      }
    }

    if (aborted) {
      restore_good();
    } else {
      snapshot_good();
      ++update_idx;
      for (int i = 0; i < w; ++i) {
        const EpisodeStats& st = episodes[static_cast<std::size_t>(i)].stats;
        curve << (ep + i) << ',' << util::fmt_f(st.shared_return) << ','
              << util::fmt_f(st.mean_entropy) << ',' << util::fmt_f(last_actor_loss)
              << ',' << util::fmt_f(last_critic_loss) << ','
              << (st.outcome == EpisodeOutcome::Collision ? 1 : 0) << '\n';
      }
      ep += w;
      result.episodes_run = ep;
      if (ep >= next_checkpoint) {
        save_checkpoint_at(ep);
        next_checkpoint += cfg.checkpoint_interval;
      }
    }
  }

  result.aborted_on_nan = aborted;
  save_checkpoint_at(result.episodes_run);
  curve.close();
  return result;
}

}  // namespace ovml::mappo
