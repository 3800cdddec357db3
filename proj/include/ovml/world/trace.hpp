#pragma once

#include <string>
#include <vector>

#include "ovml/world/world.hpp"

namespace ovml::world {

// One line of the episode trace log: poses, speeds, actions and reward
// terms for a completed step, as a compact JSON object.
std::string step_trace_json(const World& w, int step,
                            const std::vector<Action>& actions,
                            const StepResult& res);

void write_trace(const std::string& path, const std::vector<std::string>& lines);

}  // namespace ovml::world
