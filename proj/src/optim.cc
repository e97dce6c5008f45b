#include "reliefir/optim.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "reliefir/errors.h"

namespace reliefir {

ParamTensor::ParamTensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
  std::size_t n = std::accumulate(shape_.begin(), shape_.end(), std::size_t{1},
                                  std::multiplies<>());
  rows_ = shape_.size() >= 2 ? shape_[0] : 1;
  cols_ = rows_ == 0 ? 0 : n / rows_;
  values_.assign(n, 0.0);
  grad_.assign(n, 0.0);
  touched_flag_.assign(rows_, 0);
}

std::span<double> ParamTensor::grad_row(std::size_t r) {
  if (!touched_flag_[r]) {
    touched_flag_[r] = 1;
    touched_.push_back(r);
  }
  return {grad_.data() + r * cols_, cols_};
}

std::span<double> ParamTensor::grad() {
  for (std::size_t r = 0; r < rows_; ++r) grad_row(r);
  return grad_;
}

void ParamTensor::zero_grad() {
  for (std::size_t r : touched_) {
    std::fill_n(grad_.begin() + r * cols_, cols_, 0.0);
    touched_flag_[r] = 0;
  }
  touched_.clear();
}

std::span<double> ParamTensor::first_moment() {
  if (m_.size() != values_.size()) m_.assign(values_.size(), 0.0);
  return m_;
}

std::span<double> ParamTensor::second_moment() {
  if (v_.size() != values_.size()) v_.assign(values_.size(), 0.0);
  return v_;
}

void ParamTensor::reset_optimizer_state() {
  m_.clear();
  v_.clear();
}

void ParamTensor::round_to_storage() {
  for (double& x : values_) x = static_cast<double>(static_cast<float>(x));
}

ParamTensor& ParamStore::add(const std::string& name, std::vector<std::size_t> shape) {
  auto [it, inserted] = tensors_.emplace(name, ParamTensor(std::move(shape)));
  if (!inserted) throw ConfigError("duplicate parameter " + name);
  return it->second;
}

ParamTensor& ParamStore::get(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ConfigError("no parameter named " + name);
  return it->second;
}

const ParamTensor& ParamStore::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ConfigError("no parameter named " + name);
  return it->second;
}

void ParamStore::zero_grad() {
  for (auto& [_, t] : tensors_) t.zero_grad();
}

void ParamStore::round_to_storage() {
  for (auto& [_, t] : tensors_) t.round_to_storage();
}

namespace {

void require_finite_grad(const ParamTensor& p) {
  auto grad = p.grad_values();
  for (std::size_t r : p.touched_rows())
    for (std::size_t c = 0; c < p.cols(); ++c)
      if (!std::isfinite(grad[r * p.cols() + c]))
        throw NumericError("non-finite gradient");
}

}  // namespace

void sgd_step(ParamTensor& p, double lr) {
  require_finite_grad(p);
  auto values = p.values();
  auto grad = p.grad_values();
  const std::size_t cols = p.cols();
  for (std::size_t r : p.touched_rows())
    for (std::size_t c = 0; c < cols; ++c) values[r * cols + c] -= lr * grad[r * cols + c];
  p.zero_grad();
}

void adam_step(ParamTensor& p, const AdamConfig& cfg, std::uint64_t step) {
  if (step < 1) throw ConfigError("Adam step index starts at 1");
  require_finite_grad(p);
  auto values = p.values();
  auto grad = p.grad_values();
  auto m = p.first_moment();
  auto v = p.second_moment();
  const double t = static_cast<double>(step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);
  const std::size_t cols = p.cols();
  for (std::size_t r : p.touched_rows()) {
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t i = r * cols + c;
      double g = grad[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      double m_hat = bias1 > 0.0 ? m[i] / bias1 : m[i];
      double v_hat = bias2 > 0.0 ? v[i] / bias2 : v[i];
      double denom = std::sqrt(v_hat) + cfg.eps;
      double update = denom > 0.0 ? cfg.lr * m_hat / denom : 0.0;
      if (!std::isfinite(update)) throw NumericError("non-finite Adam update");
      values[i] -= update;
    }
  }
  p.zero_grad();
}

void clip_grad(ParamTensor& p, double limit) {
  const std::size_t cols = p.cols();
  std::vector<std::size_t> rows = p.touched_rows();
  for (std::size_t r : rows) {
    auto g = p.grad_row(r);
    for (std::size_t c = 0; c < cols; ++c) g[c] = std::clamp(g[c], -limit, limit);
  }
}

GradCheckResult grad_check(const std::vector<std::pair<std::string, ParamTensor*>>& params,
                           const std::function<double()>& loss_and_grad,
                           const std::function<double()>& loss,
                           const GradCheckOptions& options) {
  for (auto& [_, p] : params) p->zero_grad();
  loss_and_grad();

  // Snapshot analytic gradients before any further evaluation.
  std::vector<std::vector<double>> analytic;
  for (auto& [_, p] : params) {
    auto g = p->grad_values();
    analytic.emplace_back(g.begin(), g.end());
  }

  std::mt19937_64 rng(options.seed);
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  std::vector<std::pair<std::size_t, std::size_t>> rest;
  std::size_t total = 0;
  for (std::size_t t = 0; t < params.size(); ++t) total += params[t].second->size();
  for (std::size_t t = 0; t < params.size(); ++t) {
    std::vector<std::size_t> idx(params[t].second->size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (total > options.max_entries) std::shuffle(idx.begin(), idx.end(), rng);
    std::size_t take = total > options.max_entries
                           ? std::min(idx.size(), options.min_per_tensor)
                           : idx.size();
    for (std::size_t k = 0; k < idx.size(); ++k)
      (k < take ? chosen : rest).emplace_back(t, idx[k]);
  }
  if (chosen.size() < options.max_entries && !rest.empty()) {
    std::shuffle(rest.begin(), rest.end(), rng);
    std::size_t extra = std::min(rest.size(), options.max_entries - chosen.size());
    chosen.insert(chosen.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(extra));
  }

  GradCheckResult result;
  for (auto [t, i] : chosen) {
    auto values = params[t].second->values();
    const double saved = values[i];
    values[i] = saved + options.epsilon;
    double up = loss();
    values[i] = saved - options.epsilon;
    double down = loss();
    values[i] = saved;
    double numeric = (up - down) / (2.0 * options.epsilon);
    double a = analytic[t][i];
    double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
    ++result.entries_checked;
    if (a != 0.0 || numeric != 0.0) ++result.nonzero_entries;
    if (result.worst_entry.empty() || rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_entry = params[t].first + "[" + std::to_string(i) + "]";
    }
  }
  for (auto& [_, p] : params) p->zero_grad();
  return result;
}

}  // namespace reliefir
