#include "ovml/mappo/nets.hpp"

#include <cmath>

#include "ovml/world/world.hpp"

namespace ovml::mappo {

using grad::Tape;
using grad::Tensor;

ActorNet ActorNet::init(int feat_channels, int feat_cells, int meta_dim,
                        util::Rng& rng) {
  ActorNet a;
  a.feat_channels = feat_channels;
  a.feat_cells = feat_cells;
  a.meta_dim = meta_dim;
  const int k = 3;
  const int c1 = 8, c2 = 8;
  a.cw1 = Tensor::glorot({c1, feat_channels, k, k}, feat_channels * k * k, c1 * k * k, rng);
  a.cb1 = Tensor::zeros({c1}, true);
  a.cw2 = Tensor::glorot({c2, c1, k, k}, c1 * k * k, c2 * k * k, rng);
  a.cb2 = Tensor::zeros({c2}, true);
  const int flat = a.trunk_flat_dim() + meta_dim;
  a.fw1 = Tensor::glorot({128, flat}, flat, 128, rng);
  a.fb1 = Tensor::zeros({128}, true);
  a.fw2 = Tensor::glorot({64, 128}, 128, 64, rng);
  a.fb2 = Tensor::zeros({64}, true);
  a.fw3 = Tensor::glorot({world::kNumActions, 64}, 64, world::kNumActions, rng);
  a.fb3 = Tensor::zeros({world::kNumActions}, true);
  return a;
}

int ActorNet::trunk_flat_dim() const {
  const int h1 = (feat_cells + 2 - 3) / 2 + 1;
  const int h2 = (h1 + 2 - 3) / 2 + 1;
  return 8 * h2 * h2;
}

Tensor ActorNet::forward(Tape* tape, const Tensor& features, const Tensor& meta) const {
  Tensor h = grad::relu(tape, grad::conv2d(tape, features, cw1, cb1, 2, 1));
  h = grad::relu(tape, grad::conv2d(tape, h, cw2, cb2, 2, 1));
  Tensor flat = grad::flatten(tape, h);
  std::vector<Tensor> parts{flat, meta};
  Tensor joined = grad::concat(tape, parts);
  Tensor d = grad::relu(tape, grad::linear(tape, joined, fw1, fb1));
  d = grad::relu(tape, grad::linear(tape, d, fw2, fb2));
  return grad::linear(tape, d, fw3, fb3);
}

std::vector<std::pair<std::string, Tensor>> ActorNet::named_params(
    const std::string& prefix) const {
  return {{prefix + "/cw1", cw1}, {prefix + "/cb1", cb1}, {prefix + "/cw2", cw2},
          {prefix + "/cb2", cb2}, {prefix + "/fw1", fw1}, {prefix + "/fb1", fb1},
          {prefix + "/fw2", fw2}, {prefix + "/fb2", fb2}, {prefix + "/fw3", fw3},
          {prefix + "/fb3", fb3}};
}

std::vector<Tensor> ActorNet::params() const {
  return {cw1, cb1, cw2, cb2, fw1, fb1, fw2, fb2, fw3, fb3};
}

CriticNet CriticNet::init(int in_dim, util::Rng& rng) {
  CriticNet c;
  c.in_dim = in_dim;
  c.w1 = Tensor::glorot({128, in_dim}, in_dim, 128, rng);
  c.b1 = Tensor::zeros({128}, true);
  c.w2 = Tensor::glorot({64, 128}, 128, 64, rng);
  c.b2 = Tensor::zeros({64}, true);
  c.w3 = Tensor::glorot({1, 64}, 64, 1, rng);
  c.b3 = Tensor::zeros({1}, true);
  return c;
}

Tensor CriticNet::forward(Tape* tape, const Tensor& input) const {
  Tensor d = grad::relu(tape, grad::linear(tape, input, w1, b1));
  d = grad::relu(tape, grad::linear(tape, d, w2, b2));
  return grad::linear(tape, d, w3, b3);
}

std::vector<std::pair<std::string, Tensor>> CriticNet::named_params(
    const std::string& prefix) const {
  return {{prefix + "/w1", w1}, {prefix + "/b1", b1}, {prefix + "/w2", w2},
          {prefix + "/b2", b2}, {prefix + "/w3", w3}, {prefix + "/b3", b3}};
}

std::vector<Tensor> CriticNet::params() const { return {w1, b1, w2, b2, w3, b3}; }

void ReturnNormalizer::update(std::span<const double> returns) {
  for (double r : returns) {
    count += 1.0;
    const double d = r - mean;
    mean += d / count;
    m2 += d * (r - mean);
  }
}

double ReturnNormalizer::std_dev() const {
  if (count < 2.0) return 1.0;
  return std::max(std::sqrt(m2 / count), 1e-6);
}

double ReturnNormalizer::normalize(double raw) const {
  return (raw - mean) / std_dev();
}

double ReturnNormalizer::denormalize(double norm) const {
  return norm * std_dev() + mean;
}

grad::NamedTensors PolicySet::to_named() const {
  grad::NamedTensors out;
  for (auto& kv : encoder.named_params("encoder")) out.push_back(kv);
  for (auto& kv : actor.named_params("actor")) out.push_back(kv);
  for (auto& kv : critic.named_params("critic")) out.push_back(kv);
  out.emplace_back("value_norm/state",
                   Tensor::from_data({ret_norm.count, ret_norm.mean, ret_norm.m2}, {3}));
  return out;
}

PolicySet PolicySet::from_named(const grad::NamedTensors& named, int bev_channels,
                                int encoder_hidden, int feature_channels,
                                double occupancy_cap, int feat_cells, int meta_dim,
                                int state_dim) {
  util::Rng dummy(0);
  PolicySet p;
  p.encoder = comms::EncoderNet::init(bev_channels, encoder_hidden, feature_channels,
                                      occupancy_cap, dummy);
  p.actor = ActorNet::init(feature_channels, feat_cells, meta_dim, dummy);
  const int feat_flat = feature_channels * feat_cells * feat_cells;
  p.critic = CriticNet::init(state_dim + feat_flat, dummy);

  auto fill = [&](Tensor dst, const std::string& name) {
    Tensor src = grad::expect_tensor(named, name, dst.shape());
    auto d = dst.value();
    auto s = src.value();
    std::copy(s.begin(), s.end(), d.begin());
  };
  for (auto& [name, t] : p.encoder.named_params("encoder")) fill(t, name);
  for (auto& [name, t] : p.actor.named_params("actor")) fill(t, name);
  for (auto& [name, t] : p.critic.named_params("critic")) fill(t, name);
  Tensor vn = grad::expect_tensor(named, "value_norm/state", {3});
  p.ret_norm.count = vn.value()[0];
  p.ret_norm.mean = vn.value()[1];
  p.ret_norm.m2 = vn.value()[2];
  return p;
}

std::vector<Tensor> PolicySet::actor_side_params() const {
  std::vector<Tensor> out = encoder.params();
  for (Tensor t : actor.params()) out.push_back(t);
  return out;
}

std::vector<Tensor> PolicySet::critic_side_params() const { return critic.params(); }

}  // namespace ovml::mappo
