#include "ovml/world/world.hpp"

#include <algorithm>
#include <cmath>

#include "ovml/lidar/lidar.hpp"

namespace ovml::world {

double action_delta_kmh(Action a, const ScenarioConfig& cfg) {
  switch (a) {
    case Action::AccelLarge: return cfg.accel_large_kmh;
    case Action::AccelSmall: return cfg.accel_small_kmh;
    case Action::NoOp: return 0.0;
    case Action::BrakeSmall: return -cfg.accel_small_kmh;
    case Action::BrakeLarge: return -cfg.accel_large_kmh;
  }
  throw ContractError("unknown action");
}

double reward_value(double r_col, double r_speed, double r_dest, double r_step) {
  return -5.0 * r_col + r_speed + 5.0 * r_dest + -0.01 * r_step;
}

double reward_value(const RewardTerms& t) {
  return reward_value(t.r_col, t.r_speed, t.r_dest, t.r_step);
}

World::World(const ScenarioConfig& cfg, std::uint64_t seed)
    : cfg_(&cfg), seed_(seed), rng_(seed) {}

void World::spawn_vehicles() {
  for (int attempt = 0; attempt < 100; ++attempt) {
    vehicles_.clear();
    int id = 0;
    for (const SpawnSpec& s : cfg_->cav_spawns) {
      VehicleState v;
      v.id = id++;
      v.is_cav = true;
      v.route = s.route;
      v.lane_id = cfg_->route_lane_ids[static_cast<std::size_t>(s.route)];
      v.progress = s.progress.sample(rng_);
      v.speed_kmh = s.speed_kmh.sample(rng_);
      v.base_speed_kmh = v.speed_kmh;
      v.length = s.length.sample(rng_);
      v.width = s.width.sample(rng_);
      v.pose = cfg_->routes[static_cast<std::size_t>(s.route)].pose_at(v.progress);
      vehicles_.push_back(v);
    }
    for (const SpawnSpec& s : cfg_->traffic_spawns) {
      const bool present = s.probability >= 1.0 || rng_.bernoulli(s.probability);
      VehicleState v;
      v.id = id++;
      v.is_cav = false;
      v.route = s.route;
      v.lane_id = cfg_->route_lane_ids[static_cast<std::size_t>(s.route)];
      v.progress = s.progress.sample(rng_);
      v.base_speed_kmh = s.speed_kmh.sample(rng_);
      v.speed_kmh = v.base_speed_kmh;
      v.length = s.length.sample(rng_);
      v.width = s.width.sample(rng_);
      v.pose = cfg_->routes[static_cast<std::size_t>(s.route)].pose_at(v.progress);
      v.active = present;  // absent traffic never enters the road
      vehicles_.push_back(v);
    }
    if (check_collisions().empty()) return;
  }
  throw ConfigError("scenario spawn ranges overlap: no collision-free placement in 100 samples");
}

StepResult World::reset() {
  rng_ = util::Rng(seed_);
  step_index_ = 0;
  done_ = false;
  spawn_vehicles();
  for (VehicleState& v : vehicles_) {
    if (!v.is_cav && v.active) v.speed_kmh = traffic_speed(v);
  }
  return make_result({}, {}, /*initial=*/true);
}

double World::traffic_speed(const VehicleState& v) const {
  const SpawnSpec& s =
      cfg_->traffic_spawns[static_cast<std::size_t>(v.id) - cfg_->cav_spawns.size()];
  double scale = 1.0;
  for (const SpeedProfileSeg& seg : s.profile) {
    if (v.progress < seg.until_progress) {
      scale = seg.speed_scale;
      break;
    }
  }
  return std::clamp(v.base_speed_kmh * scale, 0.0, cfg_->max_speed_kmh);
}

lidar::LidarScan World::sense(int cav_id) const {
  const VehicleState& v = vehicles_[static_cast<std::size_t>(cav_id)];
  if (!v.active) {
    lidar::LidarScan empty;
    empty.sensor_pose = v.pose;
    empty.channels = cfg_->lidar.channels;
    empty.max_range = cfg_->lidar.max_range;
    return empty;
  }
  return lidar::raycast_scan(*this, cav_id, cfg_->lidar, cfg_->fps());
}

StepResult World::make_result(std::vector<std::pair<int, int>> collisions,
                              std::vector<int> new_arrivals, bool initial) {
  StepResult r;
  r.step_index = step_index_;
  r.collisions = std::move(collisions);

  const int n = n_cavs();
  r.agent_terms.resize(static_cast<std::size_t>(n));
  r.agent_rewards.resize(static_cast<std::size_t>(n));

  if (!initial) {
    std::vector<bool> in_collision(vehicles_.size(), false);
    bool cav_collided = false;
    for (auto [i, j] : r.collisions) {
      in_collision[static_cast<std::size_t>(i)] = true;
      in_collision[static_cast<std::size_t>(j)] = true;
      if (vehicles_[static_cast<std::size_t>(i)].is_cav ||
          vehicles_[static_cast<std::size_t>(j)].is_cav) {
        cav_collided = true;
      }
    }

    double speed_sum = 0.0;
    int driving = 0;
    for (int k = 0; k < n; ++k) {
      const VehicleState& v = vehicles_[static_cast<std::size_t>(k)];
      const bool arrived_now =
          std::find(new_arrivals.begin(), new_arrivals.end(), k) != new_arrivals.end();
      if (!v.arrived || arrived_now) {
        speed_sum += v.speed_kmh / cfg_->max_speed_kmh;
        ++driving;
      }
      RewardTerms& at = r.agent_terms[static_cast<std::size_t>(k)];
      at.r_col = in_collision[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
      at.r_speed = (!v.arrived || arrived_now) ? v.speed_kmh / cfg_->max_speed_kmh : 0.0;
      at.r_dest = arrived_now ? 1.0 : 0.0;
      at.r_step = 1.0;
      r.agent_rewards[static_cast<std::size_t>(k)] = reward_value(at);
    }

    r.shared_terms.r_col = cav_collided ? 1.0 : 0.0;
    r.shared_terms.r_speed = driving > 0 ? speed_sum / driving : 0.0;
    r.shared_terms.r_dest = static_cast<double>(new_arrivals.size());
    r.shared_terms.r_step = 1.0;
    r.shared_reward = reward_value(r.shared_terms);

    bool all_arrived = true;
    for (int k = 0; k < n; ++k) {
      all_arrived = all_arrived && vehicles_[static_cast<std::size_t>(k)].arrived;
    }
    if (cav_collided) {
      done_ = true;
      r.reason = DoneReason::Collision;
    } else if (all_arrived) {
      done_ = true;
      r.reason = DoneReason::AllArrived;
    } else if (step_index_ >= cfg_->max_steps) {
      done_ = true;
      r.reason = DoneReason::Timeout;
    }
    r.done = done_;
  }

  r.scans.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) r.scans.push_back(sense(k));
  return r;
}

StepResult World::step(const std::vector<Action>& cav_actions) {
  if (done_) throw ContractError("step called after the episode is done");
  if (static_cast<int>(cav_actions.size()) != n_cavs()) {
    throw ContractError("expected one action per connected vehicle");
  }

  // speed updates: CAV deltas then clamp, traffic follows its profile
  for (int k = 0; k < n_cavs(); ++k) {
    VehicleState& v = vehicles_[static_cast<std::size_t>(k)];
    if (v.arrived) continue;
    v.speed_kmh = std::clamp(
        v.speed_kmh + action_delta_kmh(cav_actions[static_cast<std::size_t>(k)], *cfg_),
        0.0, cfg_->max_speed_kmh);
  }
  for (std::size_t i = static_cast<std::size_t>(n_cavs()); i < vehicles_.size(); ++i) {
    VehicleState& v = vehicles_[i];
    if (v.active) v.speed_kmh = traffic_speed(v);
  }

  // advance along routes
  std::vector<int> new_arrivals;
  for (VehicleState& v : vehicles_) {
    if (!v.active || v.arrived) continue;
    const Polyline& route = cfg_->routes[static_cast<std::size_t>(v.route)];
    v.progress += v.speed_kmh / 3.6 * cfg_->dt;
    v.pose = route.pose_at(v.progress);
    if (v.progress >= route.length()) {
      v.arrived = true;
      v.active = false;  // leaves the roadway
      if (v.is_cav) new_arrivals.push_back(v.id);
    }
  }

  ++step_index_;
  return make_result(check_collisions(), std::move(new_arrivals), /*initial=*/false);
}

std::vector<std::pair<int, int>> World::check_collisions() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    if (!vehicles_[i].active) continue;
    const auto ri = rect_corners(vehicles_[i].pose, vehicles_[i].length, vehicles_[i].width);
    for (std::size_t j = i + 1; j < vehicles_.size(); ++j) {
      if (!vehicles_[j].active) continue;
      const auto rj = rect_corners(vehicles_[j].pose, vehicles_[j].length, vehicles_[j].width);
      if (rects_overlap(ri, rj)) {
        out.emplace_back(vehicles_[i].id, vehicles_[j].id);
      }
    }
  }
  return out;
}

}  // namespace ovml::world
