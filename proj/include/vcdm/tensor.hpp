#pragma once

// Dense double-precision tensors with reverse-mode automatic differentiation.
//
// A Tensor is a cheap handle to a shared graph node. Operations on tensors that
// require gradients record their inputs and a backward closure on the result
// node; backward() walks the recorded graph in reverse topological order.
// Only rank-0, rank-1 and rank-2 tensors are used by the model code.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vcdm {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  std::vector<double>& ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double fill, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values, bool requires_grad = false);
  static Tensor vector(std::initializer_list<double> values) {
    return vector(std::vector<double>(values));
  }
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       bool requires_grad = false);

  // Builds a non-leaf result. The backward closure receives the result node and
  // must accumulate into the gradients of `parents`. Parents that do not
  // require gradients are still passed; the closure must skip them.
  static Tensor make_result(Shape shape, std::vector<double> values,
                            std::vector<Tensor> parents,
                            std::function<void(detail::Node&)> backward_fn);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const;
  // Direct write access; intended for optimizers and finite-difference probes
  // acting on leaf parameters.
  std::span<double> mutable_values();
  double item() const;
  double operator[](std::size_t i) const { return values()[i]; }
  double at(std::size_t r, std::size_t c) const;

  bool requires_grad() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }
  bool same_node(const Tensor& other) const { return node_ == other.node_; }

  // Returns a new leaf tensor holding a copy of the values (no gradient).
  Tensor detach() const;

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

// Disables graph recording in its scope (used for decoding and finite differences).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_mode_enabled();

// NaN/Inf detection on every op result. Defaults to on in debug builds.
void set_check_finite(bool enabled);
bool check_finite_enabled();

// ---- primitives -------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);   // [m,k] x [k,n] -> [m,n]
Tensor matvec(const Tensor& a, const Tensor& x);   // [m,n] x [n] -> [m]
Tensor transpose(const Tensor& a);                 // [m,n] -> [n,m]

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add_row_bias(const Tensor& m, const Tensor& bias);  // [m,n] + [n] per row
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double offset);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor maximum(const Tensor& a, double floor);

Tensor softmax(const Tensor& a);       // over the last axis
Tensor log_softmax(const Tensor& a);   // rank-1 only

Tensor sum(const Tensor& a);                        // -> scalar
Tensor mean(const Tensor& a);                       // -> scalar
Tensor mean_axis(const Tensor& a, std::size_t axis);  // rank-2 -> rank-1

Tensor concat(std::span<const Tensor> parts);       // rank-1 parts
Tensor concat(std::initializer_list<Tensor> parts);
Tensor stack_rows(std::span<const Tensor> rows);     // rank-1 rows -> rank-2
Tensor slice(const Tensor& a, std::size_t begin, std::size_t length);  // rank-1
Tensor row(const Tensor& m, std::size_t index);                         // rank-2 -> rank-1
Tensor row_range(const Tensor& m, std::size_t begin, std::size_t end);  // rank-2 rows [begin,end)
Tensor pick(const Tensor& a, std::size_t index);                        // rank-1 -> scalar

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(const Tensor& a, double s) { return scale(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }

// ---- reverse pass -----------------------------------------------------------

// Accumulates d(loss)/d(x) into every reachable tensor that requires grad.
// Leaf gradients accumulate across calls; interior gradients are recomputed.
void backward(const Tensor& loss);

}  // namespace vcdm
