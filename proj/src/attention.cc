#include "reliefir/attention.h"

#include <algorithm>
#include <cmath>

namespace reliefir {

namespace {

void hidden_and_scores(const ParamTensor& proj, const ParamTensor& v,
                       const std::vector<std::vector<double>>& inputs,
                       std::vector<std::vector<double>>& hidden,
                       std::vector<double>& scores) {
  const std::size_t a = proj.rows();
  auto vv = v.values();
  hidden.assign(inputs.size(), std::vector<double>(a));
  scores.assign(inputs.size(), 0.0);
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    for (std::size_t r = 0; r < a; ++r) {
      auto w = proj.row(r);
      double z = 0.0;
      for (std::size_t c = 0; c < w.size(); ++c) z += w[c] * inputs[j][c];
      hidden[j][r] = std::tanh(z);
      scores[j] += vv[r] * hidden[j][r];
    }
  }
}

std::vector<double> softmax(const std::vector<double>& scores) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    out[j] = std::exp(scores[j] - top);
    sum += out[j];
  }
  for (double& x : out) x /= sum;
  return out;
}

}  // namespace

std::vector<double> attention_forward(const ParamTensor& proj, const ParamTensor& v,
                                      const std::vector<std::vector<double>>& inputs,
                                      AttentionCache* cache) {
  std::vector<std::vector<double>> hidden;
  std::vector<double> scores;
  hidden_and_scores(proj, v, inputs, hidden, scores);
  std::vector<double> alpha = softmax(scores);
  std::vector<double> out(inputs.empty() ? 0 : inputs[0].size(), 0.0);
  for (std::size_t j = 0; j < inputs.size(); ++j)
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += alpha[j] * inputs[j][c];
  if (cache) {
    cache->inputs = inputs;
    cache->hidden = std::move(hidden);
    cache->alpha = std::move(alpha);
  }
  return out;
}

std::vector<double> attention_weights(const ParamTensor& proj, const ParamTensor& v,
                                      const std::vector<std::vector<double>>& inputs) {
  std::vector<std::vector<double>> hidden;
  std::vector<double> scores;
  hidden_and_scores(proj, v, inputs, hidden, scores);
  return softmax(scores);
}

std::vector<std::vector<double>> attention_backward(ParamTensor& proj, ParamTensor& v,
                                                    const AttentionCache& cache,
                                                    std::span<const double> d_output) {
  const std::size_t n = cache.inputs.size();
  const std::size_t a = proj.rows();
  const std::size_t dim = d_output.size();
  std::vector<std::vector<double>> d_inputs(n, std::vector<double>(dim, 0.0));

  std::vector<double> d_alpha(n, 0.0);
  double weighted = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < dim; ++c) {
      d_alpha[j] += d_output[c] * cache.inputs[j][c];
      d_inputs[j][c] += cache.alpha[j] * d_output[c];
    }
    weighted += cache.alpha[j] * d_alpha[j];
  }

  auto vv = v.values();
  auto dv = v.grad_row(0);
  std::vector<double> dz(a);
  for (std::size_t j = 0; j < n; ++j) {
    double d_score = cache.alpha[j] * (d_alpha[j] - weighted);
    if (d_score == 0.0) continue;
    const auto& h = cache.hidden[j];
    for (std::size_t r = 0; r < a; ++r) {
      dv[r] += d_score * h[r];
      dz[r] = d_score * vv[r] * (1.0 - h[r] * h[r]);
    }
    for (std::size_t r = 0; r < a; ++r) {
      auto dw = proj.grad_row(r);
      auto w = proj.row(r);
      for (std::size_t c = 0; c < dim; ++c) {
        dw[c] += dz[r] * cache.inputs[j][c];
        d_inputs[j][c] += w[c] * dz[r];
      }
    }
  }
  return d_inputs;
}

}  // namespace reliefir
