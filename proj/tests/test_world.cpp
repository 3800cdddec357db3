#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ovml/world/scenario.hpp"
#include "ovml/world/world.hpp"

using namespace ovml;
using namespace ovml::world;

namespace {

const std::string kConfigDir = OVML_CONFIG_DIR;

ScenarioConfig intersection() {
  return ScenarioConfig::from_file(kConfigDir + "/occluded_intersection.json");
}

// two parallel straight roads, traffic parked far away on its own road
ScenarioConfig straight_road(double cav_speed = 20.0) {
  ScenarioConfig cfg;
  cfg.name = "straight";
  cfg.max_steps = 200;
  cfg.routes.emplace_back(std::vector<Vec2>{{0.0, 0.0}, {400.0, 0.0}});
  cfg.routes.emplace_back(std::vector<Vec2>{{0.0, 200.0}, {400.0, 200.0}});
  cfg.routes.emplace_back(std::vector<Vec2>{{0.0, -500.0}, {400.0, -500.0}});
  cfg.route_lane_ids = {0, 1, 2};
  // a wall that hides the far-away traffic spawn from both CAV spawns
  cfg.occluders.push_back(Polygon{{{-20, -400}, {450, -400}, {450, -390}, {-20, -390}}});
  SpawnSpec cav1;
  cav1.route = 0;
  cav1.progress = {10.0, 10.0};
  cav1.speed_kmh = {cav_speed, cav_speed};
  SpawnSpec cav2 = cav1;
  cav2.route = 1;
  cfg.cav_spawns = {cav1, cav2};
  SpawnSpec traffic;
  traffic.route = 2;
  traffic.progress = {10.0, 10.0};
  traffic.speed_kmh = {20.0, 20.0};
  cfg.traffic_spawns = {traffic};
  return cfg;
}

// two CAVs on perpendicular crossing routes with exact spawns, traffic far away
ScenarioConfig crossing_fixture(double d1, double d2, double v_kmh) {
  ScenarioConfig cfg = straight_road();
  cfg.name = "crossing";
  cfg.routes.clear();
  cfg.route_lane_ids.clear();
  cfg.routes.emplace_back(std::vector<Vec2>{{-100.0, 0.0}, {100.0, 0.0}});  // east
  cfg.routes.emplace_back(std::vector<Vec2>{{0.0, -100.0}, {0.0, 100.0}});  // north
  cfg.routes.emplace_back(std::vector<Vec2>{{0.0, -500.0}, {400.0, -500.0}});
  cfg.route_lane_ids = {0, 1, 2};
  cfg.cav_spawns[0].route = 0;
  cfg.cav_spawns[0].progress = {100.0 - d1, 100.0 - d1};
  cfg.cav_spawns[0].speed_kmh = {v_kmh, v_kmh};
  cfg.cav_spawns[1].route = 1;
  cfg.cav_spawns[1].progress = {100.0 - d2, 100.0 - d2};
  cfg.cav_spawns[1].speed_kmh = {v_kmh, v_kmh};
  return cfg;
}

}  // namespace

TEST_CASE("reward: the three tabulated fixtures are exact") {
  CHECK(reward_value(1, 0, 0, 1) == -5.01);
  CHECK(reward_value(0, 0, 0, 1) == -0.01);
  CHECK(reward_value(0, 0.5, 1, 1) == 5.49);
}

TEST_CASE("reset: same seed reproduces identical poses bit for bit") {
  const ScenarioConfig cfg = intersection();
  World a(cfg, 42), b(cfg, 42);
  a.reset();
  b.reset();
  REQUIRE(a.vehicles().size() == b.vehicles().size());
  for (std::size_t i = 0; i < a.vehicles().size(); ++i) {
    CHECK(a.vehicles()[i].pose.x == b.vehicles()[i].pose.x);
    CHECK(a.vehicles()[i].pose.y == b.vehicles()[i].pose.y);
    CHECK(a.vehicles()[i].speed_kmh == b.vehicles()[i].speed_kmh);
    CHECK(a.vehicles()[i].length == b.vehicles()[i].length);
    CHECK(a.vehicles()[i].active == b.vehicles()[i].active);
  }
}

TEST_CASE("reset: sampled speeds and progress stay inside configured ranges") {
  const ScenarioConfig cfg = intersection();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    World w(cfg, seed);
    w.reset();
    for (int k = 0; k < cfg.n_cavs(); ++k) {
      const auto& v = w.vehicle(k);
      const auto& spec = cfg.cav_spawns[static_cast<std::size_t>(k)];
      CHECK(v.speed_kmh >= spec.speed_kmh.lo);
      CHECK(v.speed_kmh <= spec.speed_kmh.hi);
      CHECK(v.progress >= spec.progress.lo);
      CHECK(v.progress <= spec.progress.hi);
    }
  }
}

TEST_CASE("scenario: bundled intersection passes the occlusion ray test") {
  const ScenarioConfig cfg = intersection();  // from_file validates
  // independent oracle: nominal sight line must cross some occluder polygon
  for (const auto& cav : cfg.cav_spawns) {
    const Pose c = cfg.nominal_spawn_pose(cav);
    bool blocked = false;
    for (const auto& ts : cfg.traffic_spawns) {
      const Pose t = cfg.nominal_spawn_pose(ts);
      for (const auto& occ : cfg.occluders) {
        for (const auto& e : occ.edges()) {
          if (segments_intersect(c.position(), t.position(), e.a, e.b)) blocked = true;
        }
      }
    }
    CHECK(blocked);
  }
}

TEST_CASE("scenario: clear sight lines are rejected at construction") {
  ScenarioConfig cfg = straight_road();
  cfg.occluders.clear();  // nothing blocks anything now
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("step: NoOp on a straight road advances by speed*dt") {
  const ScenarioConfig cfg = straight_road(18.0);
  World w(cfg, 3);
  w.reset();
  const double p0 = w.vehicle(0).progress;
  w.step({Action::NoOp, Action::NoOp});
  const double expect = p0 + 18.0 / 3.6 * cfg.dt;
  CHECK(std::abs(w.vehicle(0).progress - expect) < 1e-9);
}

TEST_CASE("step: braking clamps speed at exactly zero") {
  const ScenarioConfig cfg = straight_road(20.0);
  World w(cfg, 3);
  w.reset();
  for (int i = 0; i < 6; ++i) w.step({Action::BrakeLarge, Action::BrakeLarge});
  CHECK(w.vehicle(0).speed_kmh == 0.0);
  w.step({Action::BrakeLarge, Action::BrakeLarge});
  CHECK(w.vehicle(0).speed_kmh == 0.0);
  // 20 -> 14 -> 8 -> 2 -> 0 at step 4
}

TEST_CASE("step: acceleration clamps at the maximum speed") {
  ScenarioConfig cfg = straight_road(78.0);
  World w(cfg, 3);
  w.reset();
  for (int i = 0; i < 10; ++i) w.step({Action::AccelLarge, Action::AccelLarge});
  CHECK(w.vehicle(0).speed_kmh == cfg.max_speed_kmh);
}

TEST_CASE("step: equal-arrival crossing produces a collision at the computed step") {
  const double d = 30.0;        // both 30 m from the crossing point
  const double v_kmh = 36.0;    // 10 m/s
  const ScenarioConfig cfg = crossing_fixture(d, d, v_kmh);
  World w(cfg, 1);
  w.reset();
  const auto& a = w.vehicle(0);
  const auto& b = w.vehicle(1);

  // closed-form first-overlap step for the axis-aligned geometry: vehicle 0
  // travels east along y=0, vehicle 1 north along x=0; overlap begins when
  // both |x0(t)| < (l0+w1)/2 and |y1(t)| < (w0+l1)/2
  const double v = v_kmh / 3.6;
  const double need_x = 0.5 * (a.length + b.width);
  const double need_y = 0.5 * (a.width + b.length);
  const double t_x = (d - need_x) / v;
  const double t_y = (d - need_y) / v;
  const int expect_step = static_cast<int>(std::floor(std::max(t_x, t_y) / cfg.dt)) + 1;

  int collided_at = -1;
  while (!w.done()) {
    const auto res = w.step({Action::NoOp, Action::NoOp});
    if (res.reason == DoneReason::Collision) {
      collided_at = res.step_index;
      break;
    }
  }
  REQUIRE(collided_at > 0);
  CHECK(collided_at == expect_step);
}

TEST_CASE("check_collisions: distant vehicles do not collide") {
  const ScenarioConfig cfg = straight_road();
  World w(cfg, 5);
  w.reset();
  CHECK(w.check_collisions().empty());
}

TEST_CASE("check_collisions: identical poses report the pair once") {
  ScenarioConfig cfg = crossing_fixture(30.0, 30.0, 36.0);
  cfg.cav_spawns[1].route = 0;  // same route, same progress -> same pose
  World w(cfg, 1);
  CHECK_THROWS_AS(w.reset(), ConfigError);  // spawn overlap is rejected, so
  // exercise the geometry directly instead
  const Pose p{1.0, 2.0, 0.3};
  const auto r1 = rect_corners(p, 4.5, 1.9);
  const auto r2 = rect_corners(p, 4.5, 1.9);
  CHECK(rects_overlap(r1, r2));
}

TEST_CASE("rects_overlap: corner contact is not a collision") {
  const Pose a{0.0, 0.0, 0.0};
  const Pose b{4.5, 1.9, 0.0};  // shares exactly one corner with a
  const auto ra = rect_corners(a, 4.5, 1.9);
  const auto rb = rect_corners(b, 4.5, 1.9);
  CHECK_FALSE(rects_overlap(ra, rb));
  const Pose c{4.5 - 1e-9, 1.9 - 1e-9, 0.0};
  CHECK(rects_overlap(ra, rect_corners(c, 4.5, 1.9)));
}

TEST_CASE("rects_overlap: agrees with an independent containment/crossing oracle") {
  util::Rng rng(99);
  auto oracle = [](const std::array<Vec2, 4>& A, const std::array<Vec2, 4>& B) {
    auto inside = [](Vec2 p, const std::array<Vec2, 4>& R) {
      // strict interior: consistently on the open side of all edges
      double side = 0.0;
      for (int i = 0; i < 4; ++i) {
        const Vec2 e = R[(i + 1) % 4] - R[i];
        const double c = e.cross(p - R[i]);
        if (std::abs(c) < 1e-12) return false;
        if (side == 0.0) side = c;
        if (side * c < 0.0) return false;
      }
      return true;
    };
    for (const auto& p : A)
      if (inside(p, B)) return true;
    for (const auto& p : B)
      if (inside(p, A)) return true;
    // proper edge crossings (the plus-sign case)
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const Vec2 p = A[i], p2 = A[(i + 1) % 4];
        const Vec2 q = B[j], q2 = B[(j + 1) % 4];
        const Vec2 r = p2 - p, s = q2 - q;
        const double den = r.cross(s);
        if (std::abs(den) < 1e-12) continue;
        const double t = (q - p).cross(s) / den;
        const double u = (q - p).cross(r) / den;
        if (t > 1e-9 && t < 1.0 - 1e-9 && u > 1e-9 && u < 1.0 - 1e-9) return true;
      }
    }
    return false;
  };
  for (int trial = 0; trial < 500; ++trial) {
    const Pose pa{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0, 6.28)};
    const Pose pb{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0, 6.28)};
    const auto ra = rect_corners(pa, rng.uniform(2, 5), rng.uniform(1, 2.5));
    const auto rb = rect_corners(pb, rng.uniform(2, 5), rng.uniform(1, 2.5));
    CHECK(rects_overlap(ra, rb) == oracle(ra, rb));
  }
}

TEST_CASE("episode: arrivals end the episode and pay the destination bonus") {
  ScenarioConfig cfg = straight_road(40.0);
  cfg.routes[0] = Polyline(std::vector<Vec2>{{0.0, 0.0}, {16.0, 0.0}});
  cfg.routes[1] = Polyline(std::vector<Vec2>{{0.0, 200.0}, {16.0, 200.0}});
  World w(cfg, 2);
  w.reset();
  double dest_sum = 0.0;
  StepResult last;
  while (!w.done()) {
    last = w.step({Action::NoOp, Action::NoOp});
    dest_sum += last.shared_terms.r_dest;
  }
  CHECK(last.reason == DoneReason::AllArrived);
  CHECK(dest_sum == 2.0);
  CHECK_FALSE(w.vehicle(0).active);  // arrived vehicles leave the road
}

TEST_CASE("episode: timeout fires at max_steps and stepping after done throws") {
  ScenarioConfig cfg = straight_road(0.0);
  cfg.max_steps = 25;
  World w(cfg, 2);
  w.reset();
  int steps = 0;
  StepResult last;
  while (!w.done()) {
    last = w.step({Action::NoOp, Action::NoOp});
    ++steps;
  }
  CHECK(steps == 25);
  CHECK(last.reason == DoneReason::Timeout);
  CHECK_THROWS_AS(w.step({Action::NoOp, Action::NoOp}), ContractError);
}

TEST_CASE("episode: identical seed and action sequence replays identically") {
  const ScenarioConfig cfg = intersection();
  auto run = [&](std::uint64_t seed) {
    World w(cfg, seed);
    w.reset();
    std::vector<double> rewards;
    util::Rng rng(7);
    while (!w.done()) {
      std::vector<Action> acts;
      for (int k = 0; k < cfg.n_cavs(); ++k) {
        acts.push_back(static_cast<Action>(rng.uniform_int(0, 4)));
      }
      rewards.push_back(w.step(acts).shared_reward);
    }
    return rewards;
  };
  const auto a = run(11);
  const auto b = run(11);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("episode: speeds stay inside [0, max] under random actions") {
  const ScenarioConfig cfg = intersection();
  World w(cfg, 17);
  w.reset();
  util::Rng rng(3);
  while (!w.done()) {
    std::vector<Action> acts;
    for (int k = 0; k < cfg.n_cavs(); ++k) {
      acts.push_back(static_cast<Action>(rng.uniform_int(0, 4)));
    }
    w.step(acts);
    for (const auto& v : w.vehicles()) {
      CHECK(v.speed_kmh >= 0.0);
      CHECK(v.speed_kmh <= cfg.max_speed_kmh);
    }
  }
}

TEST_CASE("step: wrong action count is a contract error") {
  const ScenarioConfig cfg = straight_road();
  World w(cfg, 2);
  w.reset();
  CHECK_THROWS_AS(w.step({Action::NoOp}), ContractError);
}
