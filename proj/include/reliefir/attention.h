#pragma once

#include <span>
#include <vector>

#include "reliefir/optim.h"

namespace reliefir {

// Additive attention pooling: score_j = v · tanh(P x_j),
// alpha = softmax(score), output = sum_j alpha_j x_j.
// `proj` has shape [attn_dim, input_dim] and `v` shape [attn_dim].
struct AttentionCache {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> hidden;  // tanh(P x_j)
  std::vector<double> alpha;
};

std::vector<double> attention_forward(const ParamTensor& proj, const ParamTensor& v,
                                      const std::vector<std::vector<double>>& inputs,
                                      AttentionCache* cache);

// Softmax weights only.
std::vector<double> attention_weights(const ParamTensor& proj, const ParamTensor& v,
                                      const std::vector<std::vector<double>>& inputs);

// Accumulates into proj/v gradients and returns d(output)/d(x_j) for each
// input.
std::vector<std::vector<double>> attention_backward(ParamTensor& proj, ParamTensor& v,
                                                    const AttentionCache& cache,
                                                    std::span<const double> d_output);

}  // namespace reliefir
