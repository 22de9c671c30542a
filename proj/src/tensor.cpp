#include "vcdm/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "vcdm/errors.hpp"

namespace vcdm {

namespace {

thread_local bool g_grad_enabled = true;
#ifdef NDEBUG
bool g_check_finite = false;
#else
bool g_check_finite = true;
#endif

using detail::Node;

[[noreturn]] void dimension_error(const char* op, const Shape& a, const Shape& b) {
  std::ostringstream msg;
  msg << op << ": incompatible shapes " << shape_string(a) << " and " << shape_string(b);
  throw DimensionError(msg.str());
}

[[noreturn]] void rank_error(const char* op, const Shape& a, const char* expected) {
  std::ostringstream msg;
  msg << op << ": expected " << expected << ", got shape " << shape_string(a);
  throw DimensionError(msg.str());
}

void require_defined(const Tensor& t, const char* op) {
  if (!t.defined()) throw ContractError(std::string(op) + ": undefined tensor");
}

void check_values(const char* op, const std::vector<double>& values) {
  if (!g_check_finite) return;
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite value produced");
  }
}

// Elementwise unary op with derivative expressed through input x and output y.
template <class Fwd, class Deriv>
Tensor unary(const char* name, const Tensor& a, Fwd fwd, Deriv deriv) {
  require_defined(a, name);
  auto in = a.values();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fwd(in[i]);
  check_values(name, out);
  return Tensor::make_result(a.shape(), std::move(out), {a}, [deriv](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += self.grad[i] * deriv(p.value[i], self.value[i]);
    }
  });
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  require_defined(a, op);
  require_defined(b, op);
  if (a.shape() != b.shape()) dimension_error(op, a.shape(), b.shape());
}

}  // namespace

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

// ---- Tensor -----------------------------------------------------------------

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  for (std::size_t d : shape) {
    if (d == 0) throw DimensionError("tensor: zero-sized dimension in " + shape_string(shape));
  }
  if (shape_size(shape) != values.size()) {
    throw DimensionError("tensor: shape " + shape_string(shape) + " does not match " +
                         std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double fill, bool requires_grad) {
  const std::size_t n = shape_size(shape);
  return from(std::move(shape), std::vector<double>(n, fill), requires_grad);
}

Tensor Tensor::scalar(double value) { return from({}, {value}); }

Tensor Tensor::vector(std::vector<double> values, bool requires_grad) {
  const std::size_t n = values.size();
  return from({n}, std::move(values), requires_grad);
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                      bool requires_grad) {
  return from({rows, cols}, std::move(values), requires_grad);
}

Tensor Tensor::make_result(Shape shape, std::vector<double> values, std::vector<Tensor> parents,
                           std::function<void(detail::Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->is_leaf = false;
  if (g_grad_enabled) {
    const bool any = std::any_of(parents.begin(), parents.end(),
                                 [](const Tensor& t) { return t.requires_grad(); });
    if (any) {
      node->requires_grad = true;
      node->parents.reserve(parents.size());
      for (auto& p : parents) node->parents.push_back(p.node_);
      node->backward_fn = std::move(backward_fn);
    }
  }
  return Tensor(std::move(node));
}

const Shape& Tensor::shape() const {
  require_defined(*this, "shape");
  return node_->shape;
}

std::size_t Tensor::size() const { return defined() ? node_->value.size() : 0; }

std::size_t Tensor::rows() const {
  if (rank() != 2) rank_error("rows", shape(), "rank-2 tensor");
  return node_->shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) rank_error("cols", shape(), "rank-2 tensor");
  return node_->shape[1];
}

std::span<const double> Tensor::values() const {
  require_defined(*this, "values");
  return node_->value;
}

std::span<double> Tensor::mutable_values() {
  require_defined(*this, "mutable_values");
  return node_->value;
}

double Tensor::item() const {
  if (size() != 1) throw ContractError("item: tensor of shape " + shape_string(shape()) + " is not a scalar");
  return node_->value[0];
}

double Tensor::at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }

bool Tensor::requires_grad() const { return defined() && node_->requires_grad; }

bool Tensor::has_grad() const { return defined() && node_->grad.size() == node_->value.size(); }

std::span<const double> Tensor::grad() const {
  require_defined(*this, "grad");
  return node_->grad;
}

std::span<double> Tensor::mutable_grad() {
  require_defined(*this, "mutable_grad");
  return node_->ensure_grad();
}

void Tensor::zero_grad() {
  require_defined(*this, "zero_grad");
  node_->grad.assign(node_->value.size(), 0.0);
}

Tensor Tensor::detach() const { return from(shape(), node_->value); }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_mode_enabled() { return g_grad_enabled; }
void set_check_finite(bool enabled) { g_check_finite = enabled; }
bool check_finite_enabled() { return g_check_finite; }

// ---- linear algebra ---------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined(a, "matmul");
  require_defined(b, "matmul");
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) dimension_error("matmul", a.shape(), b.shape());
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  auto av = a.values();
  auto bv = b.values();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aip * bv[p * n + j];
    }
  }
  check_values("matmul", out);
  return Tensor::make_result({m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    const auto& g = self.grad;
    if (pa.requires_grad) {
      auto& ga = pa.ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * pb.value[p * n + j];
          ga[i * k + p] += acc;
        }
    }
    if (pb.requires_grad) {
      auto& gb = pb.ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = pa.value[i * k + p];
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
        }
    }
  });
}

Tensor matvec(const Tensor& a, const Tensor& x) {
  require_defined(a, "matvec");
  require_defined(x, "matvec");
  if (a.rank() != 2 || x.rank() != 1 || a.cols() != x.size()) dimension_error("matvec", a.shape(), x.shape());
  const std::size_t m = a.rows(), n = a.cols();
  auto av = a.values();
  auto xv = x.values();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    const double* rowp = av.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) acc += rowp[j] * xv[j];
    out[i] = acc;
  }
  check_values("matvec", out);
  return Tensor::make_result({m}, std::move(out), {a, x}, [m, n](Node& self) {
    Node& pa = *self.parents[0];
    Node& px = *self.parents[1];
    const auto& g = self.grad;
    if (pa.requires_grad) {
      auto& ga = pa.ensure_grad();
      for (std::size_t i = 0; i < m; ++i) {
        const double gi = g[i];
        double* rowp = ga.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) rowp[j] += gi * px.value[j];
      }
    }
    if (px.requires_grad) {
      auto& gx = px.ensure_grad();
      for (std::size_t i = 0; i < m; ++i) {
        const double gi = g[i];
        const double* rowp = pa.value.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) gx[j] += rowp[j] * gi;
      }
    }
  });
}

Tensor transpose(const Tensor& a) {
  require_defined(a, "transpose");
  if (a.rank() != 2) rank_error("transpose", a.shape(), "rank-2 tensor");
  const std::size_t m = a.rows(), n = a.cols();
  auto av = a.values();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = av[i * n + j];
  return Tensor::make_result({n, m}, std::move(out), {a}, [m, n](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[j * m + i];
  });
}

// ---- elementwise ------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  auto av = a.values();
  auto bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  check_values("add", out);
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (int k = 0; k < 2; ++k) {
      Node& p = *self.parents[k];
      if (!p.requires_grad) continue;
      auto& g = p.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  auto av = a.values();
  auto bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  check_values("sub", out);
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) {
      auto& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (pb.requires_grad) {
      auto& g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  auto av = a.values();
  auto bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  check_values("mul", out);
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) {
      auto& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb.value[i];
    }
    if (pb.requires_grad) {
      auto& g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa.value[i];
    }
  });
}

Tensor add_row_bias(const Tensor& m, const Tensor& bias) {
  require_defined(m, "add_row_bias");
  require_defined(bias, "add_row_bias");
  if (m.rank() != 2 || bias.rank() != 1 || m.cols() != bias.size())
    dimension_error("add_row_bias", m.shape(), bias.shape());
  const std::size_t r = m.rows(), c = m.cols();
  auto mv = m.values();
  auto bv = bias.values();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] = mv[i * c + j] + bv[j];
  check_values("add_row_bias", out);
  return Tensor::make_result(m.shape(), std::move(out), {m, bias}, [r, c](Node& self) {
    Node& pm = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pm.requires_grad) {
      auto& g = pm.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (pb.requires_grad) {
      auto& g = pb.ensure_grad();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) g[j] += self.grad[i * c + j];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  return unary("scale", a, [factor](double x) { return x * factor; },
               [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& a, double offset) {
  return unary("add_scalar", a, [offset](double x) { return x + offset; },
               [](double, double) { return 1.0; });
}

Tensor tanh(const Tensor& a) {
  return unary("tanh", a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary("sigmoid", a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
               [](double, double y) { return y * (1.0 - y); });
}

Tensor exp(const Tensor& a) {
  return unary("exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary("log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  return unary("clamp", a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
               [lo, hi](double x, double) { return (x < lo || x > hi) ? 0.0 : 1.0; });
}

Tensor maximum(const Tensor& a, double floor) {
  return unary("maximum", a, [floor](double x) { return x > floor ? x : floor; },
               [floor](double x, double) { return x > floor ? 1.0 : 0.0; });
}

// ---- softmax family ---------------------------------------------------------

Tensor softmax(const Tensor& a) {
  require_defined(a, "softmax");
  if (a.rank() < 1 || a.rank() > 2) rank_error("softmax", a.shape(), "rank-1 or rank-2 tensor");
  const std::size_t n = a.shape().back();
  const std::size_t r = a.size() / n;
  auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < r; ++i) {
    const double* x = av.data() + i * n;
    double* y = out.data() + i * n;
    const double mx = *std::max_element(x, x + n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      y[j] = std::exp(x[j] - mx);
      total += y[j];
    }
    for (std::size_t j = 0; j < n; ++j) y[j] /= total;
  }
  check_values("softmax", out);
  return Tensor::make_result(a.shape(), std::move(out), {a}, [r, n](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < r; ++i) {
      const double* y = self.value.data() + i * n;
      const double* gy = self.grad.data() + i * n;
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += gy[j] * y[j];
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] += y[j] * (gy[j] - dot);
    }
  });
}

Tensor log_softmax(const Tensor& a) {
  require_defined(a, "log_softmax");
  if (a.rank() != 1) rank_error("log_softmax", a.shape(), "rank-1 tensor");
  auto av = a.values();
  const double mx = *std::max_element(av.begin(), av.end());
  double total = 0.0;
  for (double x : av) total += std::exp(x - mx);
  const double lse = mx + std::log(total);
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - lse;
  check_values("log_softmax", out);
  return Tensor::make_result(a.shape(), std::move(out), {a}, [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    double gsum = 0.0;
    for (double v : self.grad) gsum += v;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] - std::exp(self.value[i]) * gsum;
  });
}

// ---- reductions -------------------------------------------------------------

Tensor sum(const Tensor& a) {
  require_defined(a, "sum");
  double total = 0.0;
  for (double v : a.values()) total += v;
  return Tensor::make_result({}, {total}, {a}, [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (double& v : g) v += self.grad[0];
  });
}

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.size())); }

Tensor mean_axis(const Tensor& a, std::size_t axis) {
  require_defined(a, "mean_axis");
  if (a.rank() != 2 || axis > 1) rank_error("mean_axis", a.shape(), "rank-2 tensor and axis 0 or 1");
  const std::size_t r = a.rows(), c = a.cols();
  auto av = a.values();
  const std::size_t n_out = axis == 0 ? c : r;
  const double inv = 1.0 / static_cast<double>(axis == 0 ? r : c);
  std::vector<double> out(n_out, 0.0);
  if (axis == 0) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) out[j] += av[i * c + j];
  } else {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) out[i] += av[i * c + j];
  }
  for (double& v : out) v *= inv;
  return Tensor::make_result({n_out}, std::move(out), {a}, [r, c, axis, inv](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) g[i * c + j] += self.grad[axis == 0 ? j : i] * inv;
  });
}

// ---- structural -------------------------------------------------------------

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractError("concat: no inputs");
  std::vector<double> out;
  std::vector<std::size_t> offsets;
  for (const auto& t : parts) {
    require_defined(t, "concat");
    if (t.rank() != 1) rank_error("concat", t.shape(), "rank-1 tensors");
    offsets.push_back(out.size());
    auto v = t.values();
    out.insert(out.end(), v.begin(), v.end());
  }
  const std::size_t n = out.size();
  return Tensor::make_result({n}, std::move(out), std::vector<Tensor>(parts.begin(), parts.end()),
                             [offsets](Node& self) {
                               for (std::size_t k = 0; k < self.parents.size(); ++k) {
                                 Node& p = *self.parents[k];
                                 if (!p.requires_grad) continue;
                                 auto& g = p.ensure_grad();
                                 for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[offsets[k] + i];
                               }
                             });
}

Tensor concat(std::initializer_list<Tensor> parts) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor stack_rows(std::span<const Tensor> rows_in) {
  if (rows_in.empty()) throw ContractError("stack_rows: no inputs");
  const std::size_t c = rows_in.front().size();
  std::vector<double> out;
  out.reserve(c * rows_in.size());
  for (const auto& t : rows_in) {
    require_defined(t, "stack_rows");
    if (t.rank() != 1 || t.size() != c) dimension_error("stack_rows", rows_in.front().shape(), t.shape());
    auto v = t.values();
    out.insert(out.end(), v.begin(), v.end());
  }
  const std::size_t r = rows_in.size();
  return Tensor::make_result({r, c}, std::move(out), std::vector<Tensor>(rows_in.begin(), rows_in.end()),
                             [c](Node& self) {
                               for (std::size_t k = 0; k < self.parents.size(); ++k) {
                                 Node& p = *self.parents[k];
                                 if (!p.requires_grad) continue;
                                 auto& g = p.ensure_grad();
                                 for (std::size_t i = 0; i < c; ++i) g[i] += self.grad[k * c + i];
                               }
                             });
}

Tensor slice(const Tensor& a, std::size_t begin, std::size_t length) {
  require_defined(a, "slice");
  if (a.rank() != 1) rank_error("slice", a.shape(), "rank-1 tensor");
  if (length == 0 || begin + length > a.size()) {
    throw DimensionError("slice: range [" + std::to_string(begin) + "," + std::to_string(begin + length) +
                         ") out of bounds for shape " + shape_string(a.shape()));
  }
  auto av = a.values();
  std::vector<double> out(av.begin() + static_cast<std::ptrdiff_t>(begin),
                          av.begin() + static_cast<std::ptrdiff_t>(begin + length));
  return Tensor::make_result({length}, std::move(out), {a}, [begin](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[begin + i] += self.grad[i];
  });
}

Tensor row_range(const Tensor& m, std::size_t begin, std::size_t end) {
  require_defined(m, "row_range");
  if (m.rank() != 2) rank_error("row_range", m.shape(), "rank-2 tensor");
  if (begin >= end || end > m.rows()) {
    throw DimensionError("row_range: rows [" + std::to_string(begin) + "," + std::to_string(end) +
                         ") out of bounds for shape " + shape_string(m.shape()));
  }
  const std::size_t c = m.cols();
  auto mv = m.values();
  std::vector<double> out(mv.begin() + static_cast<std::ptrdiff_t>(begin * c),
                          mv.begin() + static_cast<std::ptrdiff_t>(end * c));
  return Tensor::make_result({end - begin, c}, std::move(out), {m}, [begin, c](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[begin * c + i] += self.grad[i];
  });
}

Tensor row(const Tensor& m, std::size_t index) {
  require_defined(m, "row");
  if (m.rank() != 2) rank_error("row", m.shape(), "rank-2 tensor");
  if (index >= m.rows()) {
    throw DimensionError("row: index " + std::to_string(index) + " out of bounds for shape " +
                         shape_string(m.shape()));
  }
  const std::size_t c = m.cols();
  auto mv = m.values();
  std::vector<double> out(mv.begin() + static_cast<std::ptrdiff_t>(index * c),
                          mv.begin() + static_cast<std::ptrdiff_t>((index + 1) * c));
  return Tensor::make_result({c}, std::move(out), {m}, [index, c](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < c; ++i) g[index * c + i] += self.grad[i];
  });
}

Tensor pick(const Tensor& a, std::size_t index) {
  require_defined(a, "pick");
  if (a.rank() != 1) rank_error("pick", a.shape(), "rank-1 tensor");
  if (index >= a.size()) {
    throw DimensionError("pick: index " + std::to_string(index) + " out of bounds for shape " +
                         shape_string(a.shape()));
  }
  return Tensor::make_result({}, {a.values()[index]}, {a}, [index](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad()[index] += self.grad[0];
  });
}

// ---- backward ---------------------------------------------------------------

void backward(const Tensor& loss) {
  require_defined(loss, "backward");
  if (loss.size() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " + shape_string(loss.shape()));
  }
  Node* root = loss.node();
  if (!root->requires_grad) return;

  // Iterative post-order DFS; parents are visited in recorded order so the
  // traversal (and hence accumulation order) is fixed for a given graph.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* n : order) {
    if (!n->is_leaf) n->grad.assign(n->value.size(), 0.0);
  }
  root->ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->is_leaf && n->backward_fn) n->backward_fn(*n);
  }
}

}  // namespace vcdm
