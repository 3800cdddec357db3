#pragma once

#include <cstdint>
#include <string>

#include "ovml/mappo/rollout.hpp"

namespace ovml::mappo {

struct TrainConfig {
  double clip_epsilon = 0.2;
  double entropy_coef = 0.01;
  double discount = 0.99;
  double gae_lambda = 0.95;
  int batch_size = 200;  // nominal steps per episode feeding one update
  int epochs = 4;
  int minibatches = 4;
  double lr_actor = 3e-4;
  double lr_critic = 1e-3;
  int episodes = 600;
  int rollout_workers = 2;
  double max_grad_norm = 0.5;
  int checkpoint_interval = 200;
  int encoder_hidden = 8;
  int feature_channels = 4;
  std::string aggregation = "max";

  void validate(const world::ScenarioConfig& scenario) const;
};

struct TrainResult {
  std::string checkpoint_path;   // latest checkpoint
  std::string curve_path;        // learning_curve.csv
  bool aborted_on_nan = false;
  int episodes_run = 0;
};

// Collect -> GAE -> normalize -> minibatch Adam epochs, one update per
// worker batch of episodes; emits learning_curve.csv, periodic checkpoints
// and a latest.json manifest into out_dir. A non-finite loss aborts and the
// last good parameters are what gets saved.
TrainResult train(const world::ScenarioConfig& scenario, const TrainConfig& cfg,
                  const comms::ChannelModel& channel,
                  baselines::ObservationVariant variant, const std::string& out_dir,
                  std::uint64_t root_seed);

// architecture helper shared by train and checkpoint loading
PolicySet make_policy(const world::ScenarioConfig& scenario, const TrainConfig& cfg,
                      baselines::ObservationVariant variant, std::uint64_t init_seed);

PolicySet load_policy(const std::string& checkpoint_path,
                      const world::ScenarioConfig& scenario, const TrainConfig& cfg,
                      baselines::ObservationVariant variant);

}  // namespace ovml::mappo
