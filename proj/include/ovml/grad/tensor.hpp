#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ovml/util/errors.hpp"
#include "ovml/util/rng.hpp"

namespace ovml::grad {

// Dense row-major tensor. Storage is 64-bit; anything that crosses a wire or
// a file (checkpoints, feature messages) is narrowed to f32 at that boundary.
// Copies are shallow: a Tensor is a handle onto shared storage, which is what
// lets tape closures keep buffers alive without extra bookkeeping.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor full(std::vector<int> shape, double v, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);
  static Tensor from_data(std::vector<double> data, std::vector<int> shape,
                          bool requires_grad = false);
  static Tensor uniform(std::vector<int> shape, double lo, double hi,
                        util::Rng& rng, bool requires_grad = false);
  // init in +/- sqrt(6 / (fan_in + fan_out))
  static Tensor glorot(std::vector<int> shape, int fan_in, int fan_out,
                       util::Rng& rng);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& shape() const { return node_->shape; }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  int extent(int axis) const { return node_->shape[axis]; }
  std::int64_t numel() const { return static_cast<std::int64_t>(node_->value.size()); }

  std::span<double> value() { return node_->value; }
  std::span<const double> value() const { return node_->value; }
  std::span<double> grad();
  std::span<const double> grad() const;

  bool requires_grad() const { return node_->requires_grad; }
  void zero_grad();

  double item() const;  // numel()==1 only

  Tensor clone() const;  // deep copy, detached from the source buffers

  bool same_storage(const Tensor& other) const { return node_ == other.node_; }
  bool all_finite() const;

 private:
  struct Node {
    std::vector<int> shape;
    std::vector<double> value;
    std::vector<double> grad;  // sized iff requires_grad
    bool requires_grad = false;
  };
  std::shared_ptr<Node> node_;

  static Tensor make(std::vector<int> shape, bool requires_grad);
};

std::int64_t shape_numel(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

// Ordered list of backward rules recorded during a forward pass. Replaying in
// reverse order populates gradients of every reachable requires_grad leaf;
// the tape is cleared afterwards so no gradient state leaks across steps.
class Tape {
 public:
  void record(std::function<void()> backward_rule);
  std::size_t size() const { return rules_.size(); }
  void clear() { rules_.clear(); }

  // loss must be scalar; seeds d(loss)/d(loss)=1 and replays in reverse.
  void backward(Tensor& loss);

 private:
  std::vector<std::function<void()>> rules_;
};

}  // namespace ovml::grad
