#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "ovml/lidar/lidar.hpp"
#include "ovml/world/world.hpp"

using namespace ovml;
using namespace ovml::world;
using namespace ovml::lidar;

namespace {

// minimal valid scenario: ego at the origin heading east, everything else
// configurable by the caller afterwards
ScenarioConfig base_scene() {
  ScenarioConfig cfg;
  cfg.name = "lidar-fixture";
  cfg.max_steps = 10;
  cfg.routes.emplace_back(std::vector<Vec2>{{0.0, 0.0}, {200.0, 0.0}});
  cfg.routes.emplace_back(std::vector<Vec2>{{0.0, 300.0}, {200.0, 300.0}});
  cfg.routes.emplace_back(std::vector<Vec2>{{0.0, -500.0}, {200.0, -500.0}});
  cfg.route_lane_ids = {0, 1, 2};
  cfg.occluders.push_back(Polygon{{{-20, -420}, {220, -420}, {220, -410}, {-20, -410}}});
  SpawnSpec cav;
  cav.route = 0;
  cav.progress = {0.0, 0.0};
  cav.speed_kmh = {20.0, 20.0};
  SpawnSpec cav2 = cav;
  cav2.route = 1;
  cfg.cav_spawns = {cav, cav2};
  SpawnSpec traffic;
  traffic.route = 2;
  traffic.progress = {0.0, 0.0};
  traffic.speed_kmh = {20.0, 20.0};
  cfg.traffic_spawns = {traffic};
  cfg.lidar.channels = 4;
  cfg.lidar.points_per_second = 4.0 * 360 * 20;  // 360 azimuths at 20 fps
  return cfg;
}

// fresh nearest-hit oracle, written against the same surface definition but
// with its own intersection math
struct OracleHit {
  bool hit = false;
  double range = std::numeric_limits<double>::infinity();
};

OracleHit oracle_ray(const World& w, int ego_id, double az_world, double max_range) {
  const Vec2 o = w.vehicle(ego_id).pose.position();
  const Vec2 d{std::cos(az_world), std::sin(az_world)};
  OracleHit best;
  auto test_seg = [&](Vec2 a, Vec2 b) {
    // solve o + t d = a + u (b - a)
    const Vec2 e = b - a;
    const double den = d.x * e.y - d.y * e.x;
    if (std::abs(den) < 1e-15) return;
    const double t = ((a.x - o.x) * e.y - (a.y - o.y) * e.x) / den;
    const double u = ((a.x - o.x) * d.y - (a.y - o.y) * d.x) / den;
    if (t >= 0.0 && u >= 0.0 && u <= 1.0 && t < best.range) {
      best.hit = true;
      best.range = t;
    }
  };
  for (const auto& v : w.vehicles()) {
    if (v.id == ego_id || !v.active) continue;
    const auto c = rect_corners(v.pose, v.length, v.width);
    for (int i = 0; i < 4; ++i) test_seg(c[i], c[(i + 1) % 4]);
  }
  for (const auto& occ : w.config().occluders) {
    for (std::size_t i = 0; i < occ.pts.size(); ++i) {
      test_seg(occ.pts[i], occ.pts[(i + 1) % occ.pts.size()]);
    }
  }
  if (best.range > max_range) return {};
  return best;
}

}  // namespace

TEST_CASE("raycast: a world with nothing in range yields no points") {
  const ScenarioConfig cfg = base_scene();  // everything else >= 300 m away
  World w(cfg, 1);
  w.reset();
  const LidarScan scan = raycast_scan(w, 0, cfg.lidar, cfg.fps());
  CHECK(scan.points.empty());
}

TEST_CASE("raycast: a wall 10 m ahead returns the forward ray at range 10") {
  ScenarioConfig cfg = base_scene();
  cfg.occluders.push_back(Polygon{{{10.0, -5.0}, {10.5, -5.0}, {10.5, 5.0}, {10.0, 5.0}}});
  World w(cfg, 1);
  w.reset();
  const LidarScan scan = raycast_scan(w, 0, cfg.lidar, cfg.fps());
  REQUIRE_FALSE(scan.points.empty());
  // ego heads east, so the forward ray is azimuth index 0: points at y == 0
  bool found = false;
  for (const auto& p : scan.points) {
    if (std::abs(p.y) < 1e-9 && p.x > 0.0) {
      found = true;
      CHECK(std::abs(p.x - 10.0) < 1e-6);
      CHECK(p.intensity == doctest::Approx(0.8).epsilon(1e-9));  // 1 - 10/50
    }
  }
  CHECK(found);
}

TEST_CASE("raycast: a vehicle fully behind an occluder leaves no surface points") {
  ScenarioConfig cfg = base_scene();
  // wall between ego (origin) and the second CAV, which we move onto route 0
  cfg.cav_spawns[1].route = 0;
  cfg.cav_spawns[1].progress = {30.0, 30.0};
  cfg.occluders.push_back(Polygon{{{20.0, -8.0}, {21.0, -8.0}, {21.0, 8.0}, {20.0, 8.0}}});
  World w(cfg, 1);
  w.reset();
  const auto& hidden = w.vehicle(1);
  const LidarScan scan = raycast_scan(w, 0, cfg.lidar, cfg.fps());
  for (const auto& p : scan.points) {
    const Vec2 world_pt = local_to_world(scan.sensor_pose, {p.x, p.y});
    // no return may land on the hidden vehicle's footprint
    const Vec2 rel = world_to_local(hidden.pose, world_pt);
    const bool on_vehicle = std::abs(rel.x) <= hidden.length / 2 + 1e-6 &&
                            std::abs(rel.y) <= hidden.width / 2 + 1e-6;
    CHECK_FALSE(on_vehicle);
  }
}

TEST_CASE("raycast: matches the brute-force nearest-hit oracle point for point") {
  util::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    ScenarioConfig cfg = base_scene();
    cfg.cav_spawns[1].route = 0;
    cfg.cav_spawns[1].progress = {rng.uniform(10, 40), 0};
    cfg.cav_spawns[1].progress.hi = cfg.cav_spawns[1].progress.lo;
    cfg.traffic_spawns[0].route = 0;
    cfg.traffic_spawns[0].progress = {rng.uniform(5, 45), 0};
    cfg.traffic_spawns[0].progress.hi = cfg.traffic_spawns[0].progress.lo;
    const double bx = rng.uniform(5, 30);
    cfg.occluders.push_back(
        Polygon{{{bx, rng.uniform(-10, -2)}, {bx + rng.uniform(0.5, 4), -1.0},
                 {bx + rng.uniform(0.5, 3), rng.uniform(2, 9)}}});
    World w(cfg, static_cast<std::uint64_t>(trial));
    try {
      w.reset();
    } catch (const ConfigError&) {
      continue;  // the two random vehicles overlapped; skip this draw
    }
    const LidarScan scan = raycast_scan(w, 0, cfg.lidar, cfg.fps());

    const int n_az = static_cast<int>(cfg.lidar.points_per_second / cfg.fps()) /
                     cfg.lidar.channels;
    // group points back into azimuth hits: every hit emits `channels` points
    REQUIRE(scan.points.size() % static_cast<std::size_t>(cfg.lidar.channels) == 0);
    std::size_t pi = 0;
    const double heading = w.vehicle(0).pose.heading;
    for (int j = 0; j < n_az; ++j) {
      const double az_local = 2.0 * M_PI * j / n_az;
      const OracleHit oh = oracle_ray(w, 0, heading + az_local, cfg.lidar.max_range);
      if (!oh.hit) continue;
      REQUIRE(pi < scan.points.size());
      for (int c = 0; c < cfg.lidar.channels; ++c) {
        const auto& p = scan.points[pi + static_cast<std::size_t>(c)];
        const double r = std::sqrt(p.x * p.x + p.y * p.y);
        CHECK(std::abs(r - oh.range) < 1e-9);
        CHECK(std::abs(std::atan2(p.y, p.x) -
                       std::atan2(std::sin(az_local), std::cos(az_local))) < 1e-9);
      }
      pi += static_cast<std::size_t>(cfg.lidar.channels);
    }
    CHECK(pi == scan.points.size());  // no extra points beyond oracle hits
  }
}

TEST_CASE("raycast: serial reference and parallel fan agree bit for bit") {
  ScenarioConfig cfg = base_scene();
  cfg.cav_spawns[1].route = 0;
  cfg.cav_spawns[1].progress = {25.0, 25.0};
  World w(cfg, 9);
  w.reset();
  const LidarScan a = raycast_scan_serial(w, 0, cfg.lidar, cfg.fps());
  const LidarScan b = raycast_scan(w, 0, cfg.lidar, cfg.fps());
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(std::memcmp(&a.points[i], &b.points[i], sizeof(LidarPoint)) == 0);
  }
}

TEST_CASE("dropout: rate 0 is the identity and rate 1 empties the scan") {
  LidarScan scan;
  scan.max_range = 50;
  for (int i = 0; i < 500; ++i) {
    scan.points.push_back({i * 0.01, 1.0, 0.5, 0.5});
  }
  util::Rng rng(1);
  const LidarScan same = apply_dropout(scan, 0.0, rng);
  CHECK(same.points.size() == scan.points.size());
  const LidarScan none = apply_dropout(scan, 1.0, rng);
  CHECK(none.points.empty());
  CHECK_THROWS_AS(apply_dropout(scan, 1.5, rng), ContractError);
}

TEST_CASE("dropout: kept count follows binomial statistics") {
  LidarScan scan;
  scan.max_range = 50;
  scan.points.resize(10000, LidarPoint{1, 1, 1, 0.5});
  util::Rng rng(17);
  const LidarScan kept = apply_dropout(scan, 0.2, rng);
  // 3 sigma of Binomial(10000, 0.8): 8000 +/- 120
  CHECK(kept.points.size() >= 7880);
  CHECK(kept.points.size() <= 8120);
}

TEST_CASE("dropout: kept indices look uniform under a KS test") {
  const int n = 4000;
  LidarScan scan;
  scan.max_range = 50;
  for (int i = 0; i < n; ++i) scan.points.push_back({static_cast<double>(i), 0, 0, 0.5});
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    util::Rng rng(seed);
    const LidarScan kept = apply_dropout(scan, 0.3, rng);
    const std::size_t k = kept.points.size();
    REQUIRE(k > 0);
    double d = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double emp_lo = static_cast<double>(i) / k;
      const double emp_hi = static_cast<double>(i + 1) / k;
      const double cdf = kept.points[i].x / n;  // x stores the original index
      d = std::max(d, std::max(std::abs(emp_lo - cdf), std::abs(emp_hi - cdf)));
    }
    const double critical = 1.628 / std::sqrt(static_cast<double>(k));  // alpha 0.01
    if (d > critical) ++failures;
  }
  CHECK(failures <= 3);  // a 1% test may fail a few times in 100 runs
}

TEST_CASE("rasterize: empty scan gives an all-zero grid") {
  LidarScan scan;
  scan.max_range = 50;
  const BevGrid g = rasterize_bev(scan, 32);
  for (double v : g.cells.value()) CHECK(v == 0.0);
}

TEST_CASE("rasterize: a single point lands in exactly the computed cell") {
  LidarScan scan;
  scan.max_range = 50.0;  // grid covers [-50, 50] in both axes
  scan.points.push_back({1.0, 0.0, 0.3, 0.7});
  const int cells = 128;
  const BevGrid g = rasterize_bev(scan, cells);
  // index arithmetic oracle
  const double res = 100.0 / cells;
  const int ix = static_cast<int>(std::floor((1.0 + 50.0) / res));
  const int iy = static_cast<int>(std::floor((0.0 + 50.0) / res));
  CHECK(ix == 65);
  CHECK(iy == 64);
  auto v = g.cells.value();
  int nonzero = 0;
  for (int r = 0; r < cells; ++r) {
    for (int c = 0; c < cells; ++c) {
      const double occ = v[static_cast<std::size_t>(r) * cells + c];
      if (occ != 0.0) {
        ++nonzero;
        CHECK(r == iy);
        CHECK(c == ix);
        CHECK(occ == 1.0);
      }
    }
  }
  CHECK(nonzero == 1);
  CHECK(v[static_cast<std::size_t>(cells) * cells +
          static_cast<std::size_t>(iy) * cells + ix] == 0.7);
}

TEST_CASE("rasterize: composing with zero dropout changes nothing") {
  util::Rng rng(8);
  LidarScan scan;
  scan.max_range = 50;
  for (int i = 0; i < 2000; ++i) {
    scan.points.push_back({rng.uniform(-60, 60), rng.uniform(-60, 60), 0.0,
                           rng.uniform(0, 1)});
  }
  util::Rng drop_rng(3);
  const BevGrid a = rasterize_bev(scan, 32);
  const BevGrid b = rasterize_bev(apply_dropout(scan, 0.0, drop_rng), 32);
  for (std::int64_t i = 0; i < a.cells.numel(); ++i) {
    CHECK(a.cells.value()[i] == b.cells.value()[i]);
  }
}

TEST_CASE("transform: identity, pure translation, and round trip") {
  LidarScan scan;
  scan.max_range = 50;
  scan.points.push_back({1.0, 0.0, 0.2, 0.9});
  const Pose a{0, 0, 0};
  const Pose b{5, 0, 0};

  const LidarScan same = transform_points(scan, a, a);
  CHECK(same.points[0].x == doctest::Approx(1.0).epsilon(1e-12));

  const LidarScan moved = transform_points(scan, a, b);
  CHECK(moved.points[0].x == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(moved.points[0].y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(moved.points[0].z == 0.2);
  CHECK(moved.points[0].intensity == 0.9);

  util::Rng rng(2);
  LidarScan big;
  big.max_range = 50;
  for (int i = 0; i < 100; ++i) {
    big.points.push_back({rng.uniform(-20, 20), rng.uniform(-20, 20), 1.0, 0.5});
  }
  const Pose c{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(0, 6.28)};
  const LidarScan there = transform_points(big, a, c);
  const LidarScan back = transform_points(there, c, a);
  for (std::size_t i = 0; i < big.points.size(); ++i) {
    CHECK(std::abs(back.points[i].x - big.points[i].x) < 1e-9);
    CHECK(std::abs(back.points[i].y - big.points[i].y) < 1e-9);
  }
  // rigid motions preserve pairwise distances
  for (std::size_t i = 1; i < big.points.size(); ++i) {
    const double dx0 = big.points[i].x - big.points[0].x;
    const double dy0 = big.points[i].y - big.points[0].y;
    const double dx1 = there.points[i].x - there.points[0].x;
    const double dy1 = there.points[i].y - there.points[0].y;
    CHECK(std::abs(std::hypot(dx0, dy0) - std::hypot(dx1, dy1)) < 1e-9);
  }
}

TEST_CASE("scan dump: nine significant digits, one point per line") {
  LidarScan scan;
  scan.points.push_back({1.23456789123, -2.0, 0.5, 0.25});
  const std::string dump = dump_scan(scan);
  CHECK(dump == "1.23456789 -2 0.5 0.25\n");
}
