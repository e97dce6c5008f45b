#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "reliefir/optim.h"

namespace reliefir {

// One LSTM direction. Gate blocks in the stacked weights are ordered
// input, forget, cell candidate, output; each block is `hidden` rows.
struct LstmWeights {
  const ParamTensor* wx = nullptr;  // [4H, D]
  const ParamTensor* wh = nullptr;  // [4H, H]
  const ParamTensor* b = nullptr;   // [4H]
};

// Same tensors, writable for gradient accumulation.
struct LstmParams {
  ParamTensor* wx = nullptr;
  ParamTensor* wh = nullptr;
  ParamTensor* b = nullptr;

  operator LstmWeights() const { return {wx, wh, b}; }
};

struct LstmStepCache {
  std::vector<double> x, h_prev, c_prev;
  std::vector<double> i, f, g, o, c, tanh_c, h;
};

struct BiLstmCache {
  std::vector<LstmStepCache> forward;   // in sequence order
  std::vector<LstmStepCache> backward;  // in processing order (last input first)
};

// Registers the six tensors of a bidirectional LSTM under `prefix`.
void add_bilstm_params(ParamStore& store, const std::string& prefix,
                       std::size_t input_dim, std::size_t hidden);
LstmWeights lstm_weights(const ParamStore& store, const std::string& prefix,
                         const std::string& direction);
LstmParams lstm_params(ParamStore& store, const std::string& prefix,
                       const std::string& direction);

// Returns h_j = [forward_j, backward_j] (size 2H) for each input position.
std::vector<std::vector<double>> bilstm_forward(const LstmWeights& fwd, const LstmWeights& bwd,
                                                const std::vector<std::vector<double>>& inputs,
                                                BiLstmCache* cache);

// Backpropagates d(h_j) through both directions, accumulating weight
// gradients. Returns d(input_j).
std::vector<std::vector<double>> bilstm_backward(const LstmParams& fwd, const LstmParams& bwd,
                                                 const BiLstmCache& cache,
                                                 const std::vector<std::vector<double>>& d_states);

}  // namespace reliefir
