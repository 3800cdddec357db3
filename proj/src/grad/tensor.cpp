#include "ovml/grad/tensor.hpp"

#include <cmath>
#include <string>

namespace ovml::grad {

std::int64_t shape_numel(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int e : shape) {
    if (e <= 0) throw ShapeError("tensor extent must be positive, got " + std::to_string(e));
    n *= e;
  }
  return n;
}

std::string shape_str(const std::vector<int>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Tensor Tensor::make(std::vector<int> shape, bool requires_grad) {
  Tensor t;
  t.node_ = std::make_shared<Node>();
  t.node_->shape = std::move(shape);
  t.node_->value.assign(static_cast<std::size_t>(shape_numel(t.node_->shape)), 0.0);
  t.node_->requires_grad = requires_grad;
  if (requires_grad) t.node_->grad.assign(t.node_->value.size(), 0.0);
  return t;
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  return make(std::move(shape), requires_grad);
}

Tensor Tensor::full(std::vector<int> shape, double v, bool requires_grad) {
  Tensor t = make(std::move(shape), requires_grad);
  for (double& x : t.node_->value) x = v;
  return t;
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return full({1}, v, requires_grad);
}

Tensor Tensor::from_data(std::vector<double> data, std::vector<int> shape,
                         bool requires_grad) {
  if (static_cast<std::int64_t>(data.size()) != shape_numel(shape)) {
    throw ShapeError("from_data: " + std::to_string(data.size()) +
                     " values do not fill shape " + shape_str(shape));
  }
  Tensor t = make(std::move(shape), requires_grad);
  t.node_->value = std::move(data);
  return t;
}

Tensor Tensor::uniform(std::vector<int> shape, double lo, double hi,
                       util::Rng& rng, bool requires_grad) {
  Tensor t = make(std::move(shape), requires_grad);
  for (double& x : t.node_->value) x = rng.uniform(lo, hi);
  return t;
}

Tensor Tensor::glorot(std::vector<int> shape, int fan_in, int fan_out,
                      util::Rng& rng) {
  double limit = std::sqrt(6.0 / (fan_in + fan_out));
  return uniform(std::move(shape), -limit, limit, rng, /*requires_grad=*/true);
}

std::span<double> Tensor::grad() {
  if (!node_->requires_grad) {
    throw ContractError("grad() on a tensor that does not require gradients");
  }
  return node_->grad;
}

std::span<const double> Tensor::grad() const {
  if (!node_->requires_grad) {
    throw ContractError("grad() on a tensor that does not require gradients");
  }
  return node_->grad;
}

void Tensor::zero_grad() {
  if (node_->requires_grad) {
    for (double& g : node_->grad) g = 0.0;
  }
}

double Tensor::item() const {
  if (numel() != 1) {
    throw ContractError("item() requires a scalar, shape is " + shape_str(shape()));
  }
  return node_->value[0];
}

Tensor Tensor::clone() const {
  Tensor t = make(node_->shape, node_->requires_grad);
  t.node_->value = node_->value;
  return t;
}

bool Tensor::all_finite() const {
  for (double x : node_->value) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void Tape::record(std::function<void()> backward_rule) {
  rules_.push_back(std::move(backward_rule));
}

void Tape::backward(Tensor& loss) {
  if (loss.numel() != 1) {
    throw ContractError("backward: loss must be scalar, shape is " +
                        shape_str(loss.shape()));
  }
  if (loss.requires_grad()) loss.grad()[0] += 1.0;
  for (auto it = rules_.rbegin(); it != rules_.rend(); ++it) (*it)();
  clear();
}

}  // namespace ovml::grad
