#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace reliefir {

// A trainable tensor with its gradient buffer and optional Adam moments.
// Rows are the unit of sparse updates: backward passes request gradient rows
// through grad_row(), and optimizer steps visit only the rows touched since
// the last step. A 1-D tensor is a single row.
class ParamTensor {
 public:
  ParamTensor() = default;
  explicit ParamTensor(std::vector<std::size_t> shape);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<double> grad_row(std::size_t r);
  // Whole gradient buffer; marks every row as touched.
  std::span<double> grad();
  std::span<const double> grad_values() const { return grad_; }
  const std::vector<std::size_t>& touched_rows() const { return touched_; }
  void zero_grad();

  // Adam moment buffers, allocated on first use.
  std::span<double> first_moment();
  std::span<double> second_moment();
  void reset_optimizer_state();

  // Rounds every value to the nearest 32-bit float so that the in-memory
  // model is exactly what a saved model file holds.
  void round_to_storage();

 private:
  std::vector<std::size_t> shape_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<double> grad_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::vector<std::uint8_t> touched_flag_;
  std::vector<std::size_t> touched_;
};

// Named tensors in a stable (lexicographic) order.
class ParamStore {
 public:
  ParamTensor& add(const std::string& name, std::vector<std::size_t> shape);
  ParamTensor& get(const std::string& name);
  const ParamTensor& get(const std::string& name) const;
  bool contains(const std::string& name) const { return tensors_.count(name) > 0; }

  std::map<std::string, ParamTensor>& tensors() { return tensors_; }
  const std::map<std::string, ParamTensor>& tensors() const { return tensors_; }

  void zero_grad();
  void round_to_storage();

 private:
  std::map<std::string, ParamTensor> tensors_;
};

enum class OptimizerKind { kSgd, kAdam };

struct AdamConfig {
  double lr = 0.5;
  double beta1 = 0.001;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// values -= lr * grad over touched rows, then the gradient is cleared.
// Throws NumericError (before modifying anything) if a gradient entry is
// not finite.
void sgd_step(ParamTensor& p, double lr);

// Bias-corrected Adam over touched rows; `step` is the 1-based update count.
void adam_step(ParamTensor& p, const AdamConfig& cfg, std::uint64_t step);

// Element-wise clip of the touched gradient rows to [-limit, limit].
void clip_grad(ParamTensor& p, double limit);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t entries_checked = 0;
  // Entries where either gradient estimate is nonzero.
  std::size_t nonzero_entries = 0;
  std::string worst_entry;
};

struct GradCheckOptions {
  double epsilon = 1e-4;
  // Entries to sample across all tensors; every tensor gets at least
  // `min_per_tensor` (or all of its entries if it has fewer).
  std::size_t max_entries = 400;
  std::size_t min_per_tensor = 16;
  std::uint64_t seed = 1;
};

// Compares analytic gradients with central differences. `loss_and_grad`
// must evaluate the loss and accumulate its gradient into the tensors'
// grad buffers (which are zeroed beforehand); `loss` evaluates the loss
// only. Relative error is |a - n| / max(1e-8, |a| + |n|).
GradCheckResult grad_check(const std::vector<std::pair<std::string, ParamTensor*>>& params,
                           const std::function<double()>& loss_and_grad,
                           const std::function<double()>& loss,
                           const GradCheckOptions& options);

}  // namespace reliefir
