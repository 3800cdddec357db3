// Serial vs OpenMP timings for the hot kernels, with checksum equality so a
// speedup never hides a divergence.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ovml/grad/kernels.hpp"
#include "ovml/grad/tensor.hpp"
#include "ovml/lidar/lidar.hpp"
#include "ovml/world/world.hpp"

using namespace ovml;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(int iters, const std::function<void()>& fn) {
  fn();  // warm up
  const auto t0 = Clock::now();
  for (int i = 0; i < iters; ++i) fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / iters;
}

double checksum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

void report(const char* name, double serial_ms, double omp_ms, bool match) {
  std::printf("%-28s serial %8.3f ms   omp %8.3f ms   speedup %4.2fx   %s\n", name,
              serial_ms, omp_ms, serial_ms / omp_ms, match ? "match" : "MISMATCH");
}

world::ScenarioConfig bench_scenario() {
  world::ScenarioConfig cfg;
  cfg.name = "bench";
  cfg.max_steps = 100;
  cfg.routes.emplace_back(std::vector<world::Vec2>{{-60, 1.75}, {60, 1.75}});
  cfg.routes.emplace_back(std::vector<world::Vec2>{{0, -60}, {0, 60}});
  cfg.route_lane_ids = {0, 1};
  cfg.occluders.push_back(world::Polygon{{{-30, -12}, {-6, -12}, {-6, -5}, {-30, -5}}});
  world::SpawnSpec cav;
  cav.route = 1;
  cav.progress = {5, 6};
  cav.speed_kmh = {30, 30};
  cfg.cav_spawns = {cav, cav};
  world::SpawnSpec traffic;
  traffic.route = 0;
  traffic.progress = {10, 12};
  traffic.speed_kmh = {40, 40};
  cfg.traffic_spawns = {traffic};
  cfg.lidar.points_per_second = 1e6;  // full-rate fan for the raycast bench
  return cfg;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled at build time\n");
#endif

  util::Rng rng(12345);

  {
    grad::kernels::Conv2dDims d{4, 32, 32, 8, 3, 3, 1, 1};
    grad::Tensor x = grad::Tensor::uniform({d.c_in, d.h, d.w}, -1, 1, rng);
    grad::Tensor w = grad::Tensor::uniform({d.c_out, d.c_in, d.kh, d.kw}, -1, 1, rng);
    std::vector<double> a(static_cast<std::size_t>(d.c_out) * d.out_h() * d.out_w());
    std::vector<double> b(a.size());
    const double s_ms = time_ms(200, [&] {
      grad::kernels::conv2d_forward_serial(a.data(), x.value().data(),
                                           w.value().data(), nullptr, d);
    });
    const double p_ms = time_ms(200, [&] {
      grad::kernels::conv2d_forward_omp(b.data(), x.value().data(), w.value().data(),
                                        nullptr, d);
    });
    report("conv2d 4x32x32 -> 8", s_ms, p_ms, checksum(a) == checksum(b));
  }

  {
    const int out_dim = 128, in_dim = 4224;
    grad::Tensor w = grad::Tensor::uniform({out_dim, in_dim}, -1, 1, rng);
    grad::Tensor x = grad::Tensor::uniform({in_dim}, -1, 1, rng);
    std::vector<double> a(out_dim), b(out_dim);
    const double s_ms = time_ms(500, [&] {
      grad::kernels::matvec_forward_serial(a.data(), w.value().data(),
                                           x.value().data(), nullptr, out_dim, in_dim);
    });
    const double p_ms = time_ms(500, [&] {
      grad::kernels::matvec_forward_omp(b.data(), w.value().data(), x.value().data(),
                                        nullptr, out_dim, in_dim);
    });
    report("matvec 128x4224", s_ms, p_ms, checksum(a) == checksum(b));
  }

  {
    const world::ScenarioConfig cfg = bench_scenario();
    world::World w(cfg, 7);
    w.reset();
    lidar::LidarScan a, b;
    const double s_ms = time_ms(20, [&] {
      a = lidar::raycast_scan_serial(w, 0, cfg.lidar, cfg.fps());
    });
    const double p_ms =
        time_ms(20, [&] { b = lidar::raycast_scan(w, 0, cfg.lidar, cfg.fps()); });
    const bool match = a.points.size() == b.points.size();
    report("raycast 1562 azimuths", s_ms, p_ms, match);
  }

  return 0;
}
