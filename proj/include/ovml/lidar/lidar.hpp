#pragma once

#include "ovml/lidar/types.hpp"
#include "ovml/util/rng.hpp"
#include "ovml/world/scenario.hpp"

namespace ovml::world {
class World;
}

namespace ovml::lidar {

// Fan of azimuths, each carrying `channels` elevation rays. The world is
// planar, so all channels of one azimuth share the nearest planar hit; z is
// synthesized from the channel elevation at the hit range. Surfaces behind a
// nearer hit produce no points, which is the whole point of the exercise.
//
// Pure function of the world state: identical worlds give identical scans.
LidarScan raycast_scan(const world::World& w, int ego_id,
                       const world::LidarParams& params, double fps);

// Serial reference for the parallel fan above; kept for equivalence tests.
LidarScan raycast_scan_serial(const world::World& w, int ego_id,
                              const world::LidarParams& params, double fps);

// Each point survives independently with probability 1-rate; order preserved.
LidarScan apply_dropout(const LidarScan& scan, double rate, util::Rng& rng);

// Rigid 2D motion of the (x, y) coordinates from `from` sensor frame into
// `to` sensor frame (sensor -> world -> receiver); z and intensity unchanged.
LidarScan transform_points(const LidarScan& scan, const world::Pose& from,
                           const world::Pose& to);

// Bin points by sensor-frame (x, y); channel 0 counts hits, channel 1 keeps
// the max intensity. Points at or beyond the grid edge are ignored. z plays
// no role in the raster.
BevGrid rasterize_bev(const LidarScan& scan, int cells);

// text dump, one "x y z intensity" line per point at 9 significant digits
std::string dump_scan(const LidarScan& scan);

}  // namespace ovml::lidar
