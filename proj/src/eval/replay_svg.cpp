#include "ovml/eval/replay_svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ovml/util/text.hpp"

namespace ovml::eval {

namespace {

struct Bounds {
  double min_x = -60, max_x = 60, min_y = -60, max_y = 60;
};

Bounds scene_bounds(const world::ScenarioConfig& cfg) {
  Bounds b{1e18, -1e18, 1e18, -1e18};
  auto feed = [&](double x, double y) {
    b.min_x = std::min(b.min_x, x);
    b.max_x = std::max(b.max_x, x);
    b.min_y = std::min(b.min_y, y);
    b.max_y = std::max(b.max_y, y);
  };
  for (const auto& r : cfg.routes) {
    for (const auto& p : r.points()) feed(p.x, p.y);
  }
  for (const auto& o : cfg.occluders) {
    for (const auto& p : o.pts) feed(p.x, p.y);
  }
  const double pad = 8.0;
  b.min_x -= pad;
  b.max_x += pad;
  b.min_y -= pad;
  b.max_y += pad;
  return b;
}

}  // namespace

std::string render_step_svg(const nlohmann::json& step,
                            const world::ScenarioConfig& scenario) {
  const Bounds b = scene_bounds(scenario);
  const double w = b.max_x - b.min_x;
  const double h = b.max_y - b.min_y;
  const double scale = 8.0;
  char buf[512];
  std::string svg;
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"%.2f %.2f %.2f %.2f\">\n",
                static_cast<int>(w * scale), static_cast<int>(h * scale), b.min_x,
                -b.max_y, w, h);
  svg += buf;
  svg += "<rect x=\"" + util::fmt_f(b.min_x, 2) + "\" y=\"" + util::fmt_f(-b.max_y, 2) +
         "\" width=\"" + util::fmt_f(w, 2) + "\" height=\"" + util::fmt_f(h, 2) +
         "\" fill=\"#f4f4f0\"/>\n";

  for (const auto& r : scenario.routes) {
    svg += "<polyline fill=\"none\" stroke=\"#b8b8b8\" stroke-width=\"3.5\" points=\"";
    for (const auto& p : r.points()) {
      svg += util::fmt_f(p.x, 2) + "," + util::fmt_f(-p.y, 2) + " ";
    }
    svg += "\"/>\n";
  }
  for (const auto& o : scenario.occluders) {
    svg += "<polygon fill=\"#7ca37c\" stroke=\"#4f7a4f\" stroke-width=\"0.3\" points=\"";
    for (const auto& p : o.pts) {
      svg += util::fmt_f(p.x, 2) + "," + util::fmt_f(-p.y, 2) + " ";
    }
    svg += "\"/>\n";
  }

  if (step.contains("vehicles")) {
    for (const auto& v : step.at("vehicles")) {
      if (!v.value("active", true)) continue;
      const world::Pose pose{v.at("x").get<double>(), v.at("y").get<double>(),
                             v.at("heading").get<double>()};
      const auto corners = world::rect_corners(pose, v.at("length").get<double>(),
                                               v.at("width").get<double>());
      const bool cav = v.value("cav", false);
      svg += std::string("<polygon fill=\"") + (cav ? "#3f76c2" : "#c2503f") +
             "\" stroke=\"#222\" stroke-width=\"0.15\" points=\"";
      for (const auto& c : corners) {
        svg += util::fmt_f(c.x, 2) + "," + util::fmt_f(-c.y, 2) + " ";
      }
      svg += "\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string step_summary(const nlohmann::json& step) {
  std::string line = "step " + std::to_string(step.value("step", 0));
  if (step.contains("reward")) {
    line += " reward=" + util::fmt_f(step.at("reward").value("shared", 0.0), 4);
  }
  if (step.contains("vehicles")) {
    for (const auto& v : step.at("vehicles")) {
      if (!v.value("cav", false)) continue;
      line += "  cav" + std::to_string(v.value("id", -1)) + "(" +
              util::fmt_f(v.value("x", 0.0), 1) + "," + util::fmt_f(v.value("y", 0.0), 1) +
              " @" + util::fmt_f(v.value("speed_kmh", 0.0), 1) + "km/h)";
    }
  }
  if (step.value("done", false)) line += "  [done]";
  return line;
}

}  // namespace ovml::eval
