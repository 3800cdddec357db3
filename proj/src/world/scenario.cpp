#include "ovml/world/scenario.hpp"

#include <cmath>
#include <filesystem>

#include "ovml/util/jsonutil.hpp"

namespace ovml::world {

using util::JsonObj;

int ScenarioConfig::rays_per_step() const {
  return static_cast<int>(lidar.points_per_second / fps());
}

Pose ScenarioConfig::nominal_spawn_pose(const SpawnSpec& s) const {
  const double mid = 0.5 * (s.progress.lo + s.progress.hi);
  return routes[static_cast<std::size_t>(s.route)].pose_at(mid);
}

void ScenarioConfig::validate() const {
  const std::string p = "scenario";
  if (dt <= 0.0) throw ConfigError(p + ".dt: must be > 0");
  if (max_steps <= 0) throw ConfigError(p + ".max_steps: must be > 0");
  if (max_speed_kmh <= 0.0) throw ConfigError(p + ".max_speed_kmh: must be > 0");
  if (routes.empty()) throw ConfigError(p + ".routes: empty");
  if (cav_spawns.size() < 2) {
    throw ConfigError(p + ".cav_spawns: need at least 2 connected vehicles");
  }
  if (traffic_spawns.empty()) {
    throw ConfigError(p + ".traffic_spawns: need at least 1 traffic vehicle");
  }
  bool has_certain_traffic = false;
  for (std::size_t i = 0; i < traffic_spawns.size(); ++i) {
    const auto& s = traffic_spawns[i];
    if (s.probability < 0.0 || s.probability > 1.0) {
      throw ConfigError(p + ".traffic_spawns[" + std::to_string(i) +
                        "].probability: outside [0,1]");
    }
    if (s.probability == 1.0) has_certain_traffic = true;
  }
  if (!has_certain_traffic) {
    throw ConfigError(p + ".traffic_spawns: at least one spawn needs probability 1");
  }
  auto check_spawn = [&](const SpawnSpec& s, const std::string& where) {
    if (s.route < 0 || s.route >= static_cast<int>(routes.size())) {
      throw ConfigError(where + ".route: index out of range");
    }
    if (s.progress.lo > s.progress.hi || s.speed_kmh.lo > s.speed_kmh.hi) {
      throw ConfigError(where + ": inverted range");
    }
    if (s.speed_kmh.lo < 0.0 || s.speed_kmh.hi > max_speed_kmh) {
      throw ConfigError(where + ".speed_kmh: outside [0, max_speed]");
    }
  };
  for (std::size_t i = 0; i < cav_spawns.size(); ++i) {
    check_spawn(cav_spawns[i], p + ".cav_spawns[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < traffic_spawns.size(); ++i) {
    check_spawn(traffic_spawns[i], p + ".traffic_spawns[" + std::to_string(i) + "]");
  }
  if (lidar.channels <= 0) throw ConfigError(p + ".lidar.channels: must be > 0");
  if (lidar.max_range <= 0.0) throw ConfigError(p + ".lidar.max_range: must be > 0");
  if (lidar.bev_cells <= 0) throw ConfigError(p + ".lidar.bev_cells: must be > 0");
  if (rays_per_step() < lidar.channels) {
    throw ConfigError(p + ".lidar.points_per_second: fewer than one azimuth per step");
  }

  // occlusion guarantee: every CAV spawn has a blocked sight line to at
  // least one traffic spawn
  for (std::size_t i = 0; i < cav_spawns.size(); ++i) {
    const Pose cav = nominal_spawn_pose(cav_spawns[i]);
    bool blocked = false;
    for (const auto& ts : traffic_spawns) {
      const Pose traffic = nominal_spawn_pose(ts);
      for (const Polygon& occ : occluders) {
        if (segment_hits_polygon(cav.position(), traffic.position(), occ)) {
          blocked = true;
          break;
        }
      }
      if (blocked) break;
    }
    if (!blocked) {
      throw ConfigError(p + ".cav_spawns[" + std::to_string(i) +
                        "]: sight line to every traffic spawn is clear; the "
                        "scenario must start occluded");
    }
  }
}

namespace {

RangeD parse_range(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(path + ": expected [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

SpawnSpec parse_spawn(const nlohmann::json& j, const std::string& path,
                      bool traffic) {
  JsonObj o(j, path);
  SpawnSpec s;
  s.route = o.get<int>("route");
  s.progress = parse_range(o.raw("progress"), path + ".progress");
  s.speed_kmh = parse_range(o.raw("speed_kmh"), path + ".speed_kmh");
  if (o.has("length")) s.length = parse_range(o.raw("length"), path + ".length");
  if (o.has("width")) s.width = parse_range(o.raw("width"), path + ".width");
  if (traffic) {
    s.probability = o.get_or<double>("probability", 1.0);
    const auto& prof = o.raw_or_null("profile");
    if (!prof.is_null()) {
      for (std::size_t i = 0; i < prof.size(); ++i) {
        JsonObj seg(prof[i], path + ".profile[" + std::to_string(i) + "]");
        SpeedProfileSeg ps;
        ps.until_progress = seg.get_or<double>("until_progress", 1e18);
        ps.speed_scale = seg.get<double>("speed_scale");
        seg.done();
        s.profile.push_back(ps);
      }
    }
  }
  o.done();
  return s;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j,
                                         const std::string& path_for_errors) {
  JsonObj o(j, path_for_errors);
  ScenarioConfig c;
  c.name = o.get<std::string>("name");
  const std::string kind = o.get<std::string>("kind");
  if (kind == "occluded_intersection") {
    c.kind = ScenarioKind::OccludedIntersection;
  } else if (kind == "blind_summit") {
    c.kind = ScenarioKind::BlindSummit;
  } else {
    throw ConfigError(path_for_errors + ".kind: unknown value '" + kind + "'");
  }
  c.dt = o.get_or<double>("dt", 0.05);
  c.max_steps = o.get<int>("max_steps");
  c.max_speed_kmh = o.get_or<double>("max_speed_kmh", 80.0);
  c.accel_small_kmh = o.get_or<double>("accel_small_kmh", 2.0);
  c.accel_large_kmh = o.get_or<double>("accel_large_kmh", 6.0);

  const auto& lj = o.raw_or_null("lidar");
  if (!lj.is_null()) {
    JsonObj lo(lj, path_for_errors + ".lidar");
    c.lidar.channels = lo.get_or<int>("channels", 32);
    c.lidar.max_range = lo.get_or<double>("max_range", 50.0);
    c.lidar.points_per_second = lo.get_or<double>("points_per_second", 1e6);
    c.lidar.bev_cells = lo.get_or<int>("bev_cells", 128);
    c.lidar.sensor_height = lo.get_or<double>("sensor_height", 1.7);
    c.lidar.elevation_min_deg = lo.get_or<double>("elevation_min_deg", -15.0);
    c.lidar.elevation_max_deg = lo.get_or<double>("elevation_max_deg", 5.0);
    c.lidar.occupancy_cap = lo.get_or<double>("occupancy_cap", 24.0);
    lo.done();
  }

  const auto& routes = o.raw("routes");
  for (std::size_t i = 0; i < routes.size(); ++i) {
    const std::string rp = path_for_errors + ".routes[" + std::to_string(i) + "]";
    JsonObj ro(routes[i], rp);
    ro.get_or<int>("id", static_cast<int>(i));
    const int lane = ro.get_or<int>("lane_id", static_cast<int>(i));
    const auto& pts = ro.raw("points");
    std::vector<Vec2> poly;
    for (const auto& pt : pts) {
      if (!pt.is_array() || pt.size() != 2) {
        throw ConfigError(rp + ".points: expected [x, y] pairs");
      }
      poly.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    ro.done();
    try {
      c.routes.emplace_back(std::move(poly));
    } catch (const Error& e) {
      throw ConfigError(rp + ".points: " + e.what());
    }
    c.route_lane_ids.push_back(lane);
  }

  const auto& occs = o.raw_or_null("occluders");
  if (!occs.is_null()) {
    for (std::size_t i = 0; i < occs.size(); ++i) {
      const std::string op = path_for_errors + ".occluders[" + std::to_string(i) + "]";
      JsonObj oo(occs[i], op);
      const auto& pts = oo.raw("polygon");
      Polygon poly;
      for (const auto& pt : pts) {
        poly.pts.push_back({pt[0].get<double>(), pt[1].get<double>()});
      }
      oo.done();
      if (poly.pts.size() < 3) throw ConfigError(op + ".polygon: need >= 3 points");
      c.occluders.push_back(std::move(poly));
    }
  }

  const auto& cavs = o.raw("cav_spawns");
  for (std::size_t i = 0; i < cavs.size(); ++i) {
    c.cav_spawns.push_back(parse_spawn(
        cavs[i], path_for_errors + ".cav_spawns[" + std::to_string(i) + "]", false));
  }
  const auto& traffic = o.raw("traffic_spawns");
  for (std::size_t i = 0; i < traffic.size(); ++i) {
    c.traffic_spawns.push_back(parse_spawn(
        traffic[i], path_for_errors + ".traffic_spawns[" + std::to_string(i) + "]",
        true));
  }
  o.done();
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
  return from_json(util::load_json_file(path), "scenario(" + path + ")");
}

}  // namespace ovml::world
