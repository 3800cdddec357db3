#include "ovml/baselines/ttc.hpp"

#include <cmath>
#include <limits>

namespace ovml::baselines {

using world::Action;
using world::VehicleState;
using world::World;

Action ttc_policy(std::optional<double> front_gap_m, double closing_speed_mps,
                  double ego_speed_kmh, double front_speed_kmh,
                  const TtcParams& params) {
  if (!front_gap_m) {
    const double diff = params.target_speed_kmh - ego_speed_kmh;
    if (diff > params.deadband_kmh) {
      return diff > 2.0 * params.deadband_kmh ? Action::AccelLarge : Action::AccelSmall;
    }
    if (diff < -params.deadband_kmh) return Action::BrakeSmall;
    return Action::NoOp;
  }
  const double ttc = closing_speed_mps > 0.0
                         ? *front_gap_m / closing_speed_mps
                         : std::numeric_limits<double>::infinity();
  if (ttc < params.ttc_threshold_s) return Action::BrakeLarge;
  const double diff = front_speed_kmh - ego_speed_kmh;
  if (diff > params.deadband_kmh) return Action::AccelSmall;
  if (diff < -params.deadband_kmh) return Action::BrakeSmall;
  return Action::NoOp;
}

TtcController::TtcController(const world::ScenarioConfig& cfg, TtcParams params)
    : cfg_(&cfg), params_(params) {
  const std::size_t n = cfg.routes.size();
  crossings_.assign(n, std::vector<std::vector<std::pair<double, double>>>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b) crossings_[a][b] = world::polyline_crossings(cfg.routes[a], cfg.routes[b]);
    }
  }
}

bool TtcController::visible(const World& w, const VehicleState& ego,
                            const VehicleState& other) const {
  (void)w;
  for (const world::Polygon& occ : cfg_->occluders) {
    if (world::segment_hits_polygon(ego.pose.position(), other.pose.position(), occ)) {
      return false;
    }
  }
  return true;
}

std::optional<FrontVehicle> TtcController::find_front_vehicle(const World& w,
                                                              int ego_id) const {
  const VehicleState& ego = w.vehicle(ego_id);
  std::optional<FrontVehicle> best;
  double best_ahead = std::numeric_limits<double>::infinity();
  for (const VehicleState& v : w.vehicles()) {
    if (v.id == ego_id || !v.active || v.route != ego.route) continue;
    const double ahead = v.progress - ego.progress;
    if (ahead <= 0.0 || ahead > params_.detect_range_m) continue;
    if (!visible(w, ego, v)) continue;
    if (ahead < best_ahead) {
      best_ahead = ahead;
      FrontVehicle f;
      f.gap_m = std::max(0.0, ahead - 0.5 * (v.length + ego.length));
      f.closing_mps = (ego.speed_kmh - v.speed_kmh) / 3.6;
      f.speed_kmh = v.speed_kmh;
      best = f;
    }
  }
  return best;
}

bool TtcController::crossing_conflict(const World& w, int ego_id) const {
  const VehicleState& ego = w.vehicle(ego_id);
  if (ego.speed_kmh <= 0.1) return false;
  const double ego_mps = ego.speed_kmh / 3.6;
  for (const VehicleState& v : w.vehicles()) {
    if (v.id == ego_id || !v.active || v.route == ego.route) continue;
    if (!visible(w, ego, v)) continue;
    const auto& cross = crossings_[static_cast<std::size_t>(ego.route)]
                                  [static_cast<std::size_t>(v.route)];
    for (const auto& [s_ego, s_other] : cross) {
      const double d_ego = s_ego - ego.progress;
      const double d_other = s_other - v.progress;
      if (d_ego <= 0.0 || d_other <= 0.0) continue;  // crossing already behind
      const double t_ego = d_ego / ego_mps;
      const double v_mps = std::max(v.speed_kmh / 3.6, 0.1);
      const double t_other = d_other / v_mps;
      if (t_ego < params_.ttc_threshold_s &&
          std::abs(t_ego - t_other) < params_.conflict_window_s) {
        return true;
      }
    }
  }
  return false;
}

Action TtcController::act_single(const World& w, int ego_id) const {
  const VehicleState& ego = w.vehicle(ego_id);
  if (ego.arrived) return Action::NoOp;
  if (crossing_conflict(w, ego_id)) return Action::BrakeLarge;
  const auto front = find_front_vehicle(w, ego_id);
  if (front) {
    return ttc_policy(front->gap_m, front->closing_mps, ego.speed_kmh,
                      front->speed_kmh, params_);
  }
  return ttc_policy(std::nullopt, 0.0, ego.speed_kmh, 0.0, params_);
}

std::vector<Action> TtcController::act(const World& w) const {
  std::vector<Action> out;
  out.reserve(static_cast<std::size_t>(w.n_cavs()));
  for (int k = 0; k < w.n_cavs(); ++k) out.push_back(act_single(w, k));
  return out;
}

}  // namespace ovml::baselines
