#pragma once

#include <vector>

#include "ovml/grad/tensor.hpp"
#include "ovml/world/geometry.hpp"

namespace ovml::lidar {

// One return: sensor-frame coordinates plus the remaining intensity after
// range attenuation.
struct LidarPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
};

struct LidarScan {
  std::vector<LidarPoint> points;
  world::Pose sensor_pose;  // sensor-in-world
  int channels = 32;
  double max_range = 50.0;
};

// Ego-centered raster over [-max_range, +max_range]^2 in the sensor frame.
// Channel 0 holds raw occupancy counts, channel 1 the per-cell max intensity.
struct BevGrid {
  grad::Tensor cells;  // [2, H, W]
  double resolution = 0.0;
  double max_range = 0.0;

  int size() const { return cells.defined() ? cells.extent(1) : 0; }
};

}  // namespace ovml::lidar
