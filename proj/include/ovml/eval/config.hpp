#pragma once

#include <string>
#include <vector>

#include "ovml/baselines/ttc.hpp"
#include "ovml/comms/channel.hpp"
#include "ovml/mappo/trainer.hpp"

namespace ovml::eval {

// One JSON document with sections {scenario, train, comms, eval}. Unknown
// keys are rejected with the full field path. The scenario section is either
// inline or {"file": "relative/path.json"} resolved against the config file.
struct ExperimentConfig {
  world::ScenarioConfig scenario;
  mappo::TrainConfig train;
  comms::ChannelModel channel;
  std::string variant = "collaborative";

  struct EvalSection {
    int episodes = 100;
    std::uint64_t seed = 7;
    std::vector<double> dropout_rates{0.0, 0.1, 0.2, 0.3, 0.4};
    baselines::TtcParams ttc;
  } eval;

  std::uint64_t root_seed = 1;

  static ExperimentConfig from_file(const std::string& path);

  // message wire size at this config's feature extents
  std::size_t message_wire_bytes() const;
};

}  // namespace ovml::eval
