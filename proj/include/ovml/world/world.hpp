#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ovml/lidar/types.hpp"
#include "ovml/world/scenario.hpp"

namespace ovml::world {

// Discrete longitudinal actions; the integer encoding is stable and part of
// the checkpoint/trace contract.
enum class Action : int {
  AccelLarge = 0,
  AccelSmall = 1,
  NoOp = 2,
  BrakeSmall = 3,
  BrakeLarge = 4,
};
constexpr int kNumActions = 5;

double action_delta_kmh(Action a, const ScenarioConfig& cfg);

struct VehicleState {
  int id = -1;
  Pose pose;
  double speed_kmh = 0.0;
  double length = 4.5;
  double width = 1.9;
  int lane_id = 0;
  bool is_cav = false;
  int route = 0;
  double progress = 0.0;       // arc length along route, meters
  double base_speed_kmh = 0.0; // traffic: sampled profile base speed
  bool arrived = false;        // reached the end of its route
  bool active = true;          // still on the road (arrived vehicles leave)
};

struct RewardTerms {
  double r_col = 0.0;    // 1 when a connected vehicle is in a collision
  double r_speed = 0.0;  // mean speed / max speed over driving CAVs
  double r_dest = 0.0;   // arrivals this step
  double r_step = 0.0;   // 1 per step
};

// R = -5 r_col + r_speed + 5 r_dest - 0.01 r_step
double reward_value(double r_col, double r_speed, double r_dest, double r_step);
double reward_value(const RewardTerms& t);

enum class DoneReason { None, Collision, AllArrived, Timeout };

struct StepResult {
  std::vector<lidar::LidarScan> scans;  // one per CAV, empty after arrival
  RewardTerms shared_terms;
  double shared_reward = 0.0;
  std::vector<RewardTerms> agent_terms;   // per-CAV, for independent training
  std::vector<double> agent_rewards;
  bool done = false;
  DoneReason reason = DoneReason::None;
  std::vector<std::pair<int, int>> collisions;
  int step_index = 0;
};

// Deterministic kinematic world: same (config, seed, actions) replays the
// same episode bit for bit. Single-threaded per instance; run independent
// instances for parallel rollouts.
class World {
 public:
  World(const ScenarioConfig& cfg, std::uint64_t seed);

  StepResult reset();
  StepResult step(const std::vector<Action>& cav_actions);

  const ScenarioConfig& config() const { return *cfg_; }
  const std::vector<VehicleState>& vehicles() const { return vehicles_; }
  const VehicleState& vehicle(int id) const { return vehicles_.at(static_cast<std::size_t>(id)); }
  int n_cavs() const { return cfg_->n_cavs(); }
  bool done() const { return done_; }
  int step_index() const { return step_index_; }

  // all strictly-overlapping pairs of active vehicle footprints (i < j)
  std::vector<std::pair<int, int>> check_collisions() const;

 private:
  void spawn_vehicles();
  double traffic_speed(const VehicleState& v) const;
  lidar::LidarScan sense(int cav_id) const;
  StepResult make_result(std::vector<std::pair<int, int>> collisions,
                         std::vector<int> new_arrivals, bool initial);

  const ScenarioConfig* cfg_;
  std::uint64_t seed_;
  util::Rng rng_;
  std::vector<VehicleState> vehicles_;
  int step_index_ = 0;
  bool done_ = false;
};

}  // namespace ovml::world
