#pragma once

#include <string>

#include <json.hpp>

#include "ovml/world/scenario.hpp"

namespace ovml::eval {

// Static top-down rendering of one trace step: routes, occluders, vehicle
// footprints (connected vehicles highlighted). Output is a standalone SVG.
std::string render_step_svg(const nlohmann::json& step,
                            const world::ScenarioConfig& scenario);

// one-line text summary used by the replay subcommand
std::string step_summary(const nlohmann::json& step);

}  // namespace ovml::eval
