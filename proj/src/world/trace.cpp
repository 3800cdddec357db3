#include "ovml/world/trace.hpp"

#include <fstream>

#include <json.hpp>

namespace ovml::world {

std::string step_trace_json(const World& w, int step,
                            const std::vector<Action>& actions,
                            const StepResult& res) {
  nlohmann::json j;
  j["step"] = step;
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : w.vehicles()) {
    vs.push_back({{"id", v.id},
                  {"cav", v.is_cav},
                  {"active", v.active},
                  {"x", v.pose.x},
                  {"y", v.pose.y},
                  {"heading", v.pose.heading},
                  {"speed_kmh", v.speed_kmh},
                  {"length", v.length},
                  {"width", v.width}});
  }
  j["vehicles"] = vs;
  nlohmann::json as = nlohmann::json::array();
  for (Action a : actions) as.push_back(static_cast<int>(a));
  j["actions"] = as;
  j["reward"] = {{"r_col", res.shared_terms.r_col},
                 {"r_speed", res.shared_terms.r_speed},
                 {"r_dest", res.shared_terms.r_dest},
                 {"r_step", res.shared_terms.r_step},
                 {"shared", res.shared_reward}};
  j["done"] = res.done;
  return j.dump();
}

void write_trace(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open trace file for writing: " + path);
  for (const std::string& l : lines) os << l << '\n';
}

}  // namespace ovml::world
