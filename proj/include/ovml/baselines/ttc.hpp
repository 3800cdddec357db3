#pragma once

#include <optional>
#include <vector>

#include "ovml/world/world.hpp"

namespace ovml::baselines {

struct TtcParams {
  double ttc_threshold_s = 3.0;
  double target_speed_kmh = 40.0;
  double detect_range_m = 50.0;
  double deadband_kmh = 1.0;
  // a visible crossing vehicle whose predicted conflict-point arrival is
  // within this window of ours counts as a braking trigger
  double conflict_window_s = 1.5;
};

// Pure car-following rule. No front vehicle: accelerate toward the target
// speed. Otherwise brake hard when time-to-collision drops below the
// threshold, else match the front vehicle's speed within a dead band.
world::Action ttc_policy(std::optional<double> front_gap_m, double closing_speed_mps,
                         double ego_speed_kmh, double front_speed_kmh,
                         const TtcParams& params);

struct FrontVehicle {
  double gap_m = 0.0;       // bumper-to-bumper along the route
  double closing_mps = 0.0; // positive when ego approaches
  double speed_kmh = 0.0;
};

// Rule-based controller for every connected vehicle. Sensing is line-of-
// sight: vehicles hidden behind occluders do not exist for this policy,
// which is exactly why it struggles here. Route crossings are precomputed.
class TtcController {
 public:
  TtcController(const world::ScenarioConfig& cfg, TtcParams params);

  std::vector<world::Action> act(const world::World& w) const;
  world::Action act_single(const world::World& w, int ego_id) const;

  std::optional<FrontVehicle> find_front_vehicle(const world::World& w,
                                                 int ego_id) const;
  bool crossing_conflict(const world::World& w, int ego_id) const;

 private:
  bool visible(const world::World& w, const world::VehicleState& ego,
               const world::VehicleState& other) const;

  const world::ScenarioConfig* cfg_;
  TtcParams params_;
  // crossings_[a][b] = crossing arc lengths (s_on_a, s_on_b)
  std::vector<std::vector<std::vector<std::pair<double, double>>>> crossings_;
};

}  // namespace ovml::baselines
