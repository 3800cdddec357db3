#include "ovml/eval/config.hpp"

#include <cmath>
#include <filesystem>

#include "ovml/util/jsonutil.hpp"
#include "ovml/util/text.hpp"

namespace ovml::eval {

namespace fs = std::filesystem;
using util::JsonObj;

std::size_t ExperimentConfig::message_wire_bytes() const {
  return comms::kWireHeaderBytes +
         static_cast<std::size_t>(train.feature_channels) * scenario.lidar.bev_cells *
             scenario.lidar.bev_cells;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  const nlohmann::json doc = util::load_json_file(path);
  JsonObj o(doc, "config");
  ExperimentConfig c;

  // scenario: inline object or file reference
  {
    const nlohmann::json& sj = o.raw("scenario");
    if (sj.is_object() && sj.contains("file") && sj.size() == 1) {
      const fs::path base = fs::path(path).parent_path();
      const std::string sp = (base / sj.at("file").get<std::string>()).string();
      c.scenario = world::ScenarioConfig::from_file(sp);
    } else {
      c.scenario = world::ScenarioConfig::from_json(sj, "config.scenario");
    }
  }

  const nlohmann::json& tj = o.raw_or_null("train");
  if (!tj.is_null()) {
    JsonObj t(tj, "config.train");
    c.train.clip_epsilon = t.get_or<double>("clip_epsilon", c.train.clip_epsilon);
    c.train.entropy_coef = t.get_or<double>("entropy_coef", c.train.entropy_coef);
    c.train.discount = t.get_or<double>("discount", c.train.discount);
    c.train.gae_lambda = t.get_or<double>("gae_lambda", c.train.gae_lambda);
    c.train.batch_size = t.get_or<int>("batch_size", c.scenario.max_steps);
    c.train.epochs = t.get_or<int>("epochs", c.train.epochs);
    c.train.minibatches = t.get_or<int>("minibatches", c.train.minibatches);
    c.train.lr_actor = t.get_or<double>("lr_actor", c.train.lr_actor);
    c.train.lr_critic = t.get_or<double>("lr_critic", c.train.lr_critic);
    c.train.episodes = t.get_or<int>("episodes", c.train.episodes);
    c.train.rollout_workers = t.get_or<int>("rollout_workers", c.train.rollout_workers);
    c.train.max_grad_norm = t.get_or<double>("max_grad_norm", c.train.max_grad_norm);
    c.train.checkpoint_interval =
        t.get_or<int>("checkpoint_interval", c.train.checkpoint_interval);
    c.train.encoder_hidden = t.get_or<int>("encoder_hidden", c.train.encoder_hidden);
    c.train.feature_channels =
        t.get_or<int>("feature_channels", c.train.feature_channels);
    c.train.aggregation = t.get_or<std::string>("aggregation", c.train.aggregation);
    t.done();
  } else {
    c.train.batch_size = c.scenario.max_steps;
  }

  const nlohmann::json& cj = o.raw_or_null("comms");
  if (!cj.is_null()) {
    JsonObj cm(cj, "config.comms");
    c.channel.comm_range = cm.get_or<double>("comm_range", 70.0);
    c.channel.fps = cm.get_or<double>("fps", c.scenario.fps());
    c.channel.budgets.dsrc_mbps = cm.get_or<double>("dsrc_mbps", 2.0);
    c.channel.budgets.cv2x_mbps = cm.get_or<double>("cv2x_mbps", 7.2);
    cm.done();
    if (std::abs(c.channel.fps - c.scenario.fps()) > 1e-9) {
      throw ConfigError("config.comms.fps: must match the scenario frame rate " +
                        std::to_string(c.scenario.fps()));
    }
    if (c.channel.comm_range <= 0.0) {
      throw ConfigError("config.comms.comm_range: must be > 0");
    }
  } else {
    c.channel.fps = c.scenario.fps();
  }

  c.variant = o.get_or<std::string>("variant", "collaborative");
  baselines::variant_from_string(c.variant);
  c.root_seed = o.get_or<std::uint64_t>("seed", 1);

  const nlohmann::json& ej = o.raw_or_null("eval");
  if (!ej.is_null()) {
    JsonObj ev(ej, "config.eval");
    c.eval.episodes = ev.get_or<int>("episodes", 100);
    c.eval.seed = ev.get_or<std::uint64_t>("seed", 7);
    if (ev.has("dropout_rates")) {
      c.eval.dropout_rates = ev.get<std::vector<double>>("dropout_rates");
    }
    const nlohmann::json& ttcj = ev.raw_or_null("ttc");
    if (!ttcj.is_null()) {
      JsonObj tt(ttcj, "config.eval.ttc");
      c.eval.ttc.ttc_threshold_s = tt.get_or<double>("threshold_s", 3.0);
      c.eval.ttc.target_speed_kmh = tt.get_or<double>("target_speed_kmh", 40.0);
      c.eval.ttc.detect_range_m = tt.get_or<double>("detect_range_m", 50.0);
      c.eval.ttc.deadband_kmh = tt.get_or<double>("deadband_kmh", 1.0);
      c.eval.ttc.conflict_window_s = tt.get_or<double>("conflict_window_s", 1.5);
      tt.done();
      if (c.eval.ttc.ttc_threshold_s <= 0.0) {
        throw ConfigError("config.eval.ttc.threshold_s: must be > 0");
      }
    }
    ev.done();
    if (c.eval.episodes < 1) {
      throw ConfigError("config.eval.episodes: must be >= 1");
    }
    for (std::size_t i = 0; i < c.eval.dropout_rates.size(); ++i) {
      const double r = c.eval.dropout_rates[i];
      if (r < 0.0 || r > 1.0) {
        throw ConfigError("config.eval.dropout_rates[" + std::to_string(i) +
                          "]: outside [0,1]");
      }
      if (i > 0 && r <= c.eval.dropout_rates[i - 1]) {
        throw ConfigError("config.eval.dropout_rates: must be strictly increasing");
      }
    }
  }
  o.done();

  c.train.validate(c.scenario);

  // the default per-message stream must fit the tighter protocol budget
  const double mbps = comms::bandwidth_mbps(c.message_wire_bytes(), c.channel.fps);
  if (!comms::budget_check(mbps, c.channel.budgets.dsrc_mbps)) {
    throw ConfigError("config: feature message stream of " + util::fmt_f(mbps, 4) +
                      " Mbps exceeds the DSRC budget of " +
                      util::fmt_f(c.channel.budgets.dsrc_mbps, 1) + " Mbps");
  }
  return c;
}

}  // namespace ovml::eval
