#include "reliefir/bilstm.h"

#include <cmath>

namespace reliefir {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

LstmStepCache lstm_step(const LstmWeights& w, const std::vector<double>& x,
                        const std::vector<double>& h_prev,
                        const std::vector<double>& c_prev) {
  const std::size_t hidden = h_prev.size();
  LstmStepCache s;
  s.x = x;
  s.h_prev = h_prev;
  s.c_prev = c_prev;
  s.i.resize(hidden);
  s.f.resize(hidden);
  s.g.resize(hidden);
  s.o.resize(hidden);
  s.c.resize(hidden);
  s.tanh_c.resize(hidden);
  s.h.resize(hidden);
  auto bias = w.b->values();
  for (std::size_t gate = 0; gate < 4; ++gate) {
    for (std::size_t k = 0; k < hidden; ++k) {
      std::size_t r = gate * hidden + k;
      double z = bias[r];
      auto wx = w.wx->row(r);
      for (std::size_t c = 0; c < x.size(); ++c) z += wx[c] * x[c];
      auto wh = w.wh->row(r);
      for (std::size_t c = 0; c < hidden; ++c) z += wh[c] * h_prev[c];
      switch (gate) {
        case 0: s.i[k] = sigmoid(z); break;
        case 1: s.f[k] = sigmoid(z); break;
        case 2: s.g[k] = std::tanh(z); break;
        default: s.o[k] = sigmoid(z); break;
      }
    }
  }
  for (std::size_t k = 0; k < hidden; ++k) {
    s.c[k] = s.f[k] * c_prev[k] + s.i[k] * s.g[k];
    s.tanh_c[k] = std::tanh(s.c[k]);
    s.h[k] = s.o[k] * s.tanh_c[k];
  }
  return s;
}

// BPTT over one direction. `d_h` holds the external gradient for each step
// in processing order; returns d(x) in processing order.
std::vector<std::vector<double>> lstm_backward(const LstmParams& w,
                                               const std::vector<LstmStepCache>& steps,
                                               const std::vector<std::vector<double>>& d_h) {
  const std::size_t n = steps.size();
  std::vector<std::vector<double>> d_x(n);
  if (n == 0) return d_x;
  const std::size_t hidden = steps[0].h.size();
  const std::size_t input_dim = steps[0].x.size();
  std::vector<double> dh_next(hidden, 0.0), dc_next(hidden, 0.0), dz(4 * hidden);
  auto db = w.b->grad_row(0);
  for (std::size_t t = n; t-- > 0;) {
    const auto& s = steps[t];
    for (std::size_t k = 0; k < hidden; ++k) {
      double dh = d_h[t][k] + dh_next[k];
      double d_o = dh * s.tanh_c[k];
      double dc = dh * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]) + dc_next[k];
      double d_i = dc * s.g[k];
      double d_g = dc * s.i[k];
      double d_f = dc * s.c_prev[k];
      dc_next[k] = dc * s.f[k];
      dz[k] = d_i * s.i[k] * (1.0 - s.i[k]);
      dz[hidden + k] = d_f * s.f[k] * (1.0 - s.f[k]);
      dz[2 * hidden + k] = d_g * (1.0 - s.g[k] * s.g[k]);
      dz[3 * hidden + k] = d_o * s.o[k] * (1.0 - s.o[k]);
    }
    d_x[t].assign(input_dim, 0.0);
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    for (std::size_t r = 0; r < 4 * hidden; ++r) {
      double g = dz[r];
      db[r] += g;
      auto gwx = w.wx->grad_row(r);
      auto wx = w.wx->row(r);
      for (std::size_t c = 0; c < input_dim; ++c) {
        gwx[c] += g * s.x[c];
        d_x[t][c] += wx[c] * g;
      }
      auto gwh = w.wh->grad_row(r);
      auto wh = w.wh->row(r);
      for (std::size_t c = 0; c < hidden; ++c) {
        gwh[c] += g * s.h_prev[c];
        dh_next[c] += wh[c] * g;
      }
    }
  }
  return d_x;
}

}  // namespace

void add_bilstm_params(ParamStore& store, const std::string& prefix,
                       std::size_t input_dim, std::size_t hidden) {
  for (const char* dir : {"fwd", "bwd"}) {
    std::string base = prefix + "_" + dir;
    store.add(base + "_wx", {4 * hidden, input_dim});
    store.add(base + "_wh", {4 * hidden, hidden});
    store.add(base + "_b", {4 * hidden});
  }
}

LstmWeights lstm_weights(const ParamStore& store, const std::string& prefix,
                         const std::string& direction) {
  std::string base = prefix + "_" + direction;
  return {&store.get(base + "_wx"), &store.get(base + "_wh"), &store.get(base + "_b")};
}

LstmParams lstm_params(ParamStore& store, const std::string& prefix,
                       const std::string& direction) {
  std::string base = prefix + "_" + direction;
  return {&store.get(base + "_wx"), &store.get(base + "_wh"), &store.get(base + "_b")};
}

std::vector<std::vector<double>> bilstm_forward(const LstmWeights& fwd, const LstmWeights& bwd,
                                                const std::vector<std::vector<double>>& inputs,
                                                BiLstmCache* cache) {
  const std::size_t n = inputs.size();
  const std::size_t hidden = fwd.wh->cols();
  std::vector<LstmStepCache> f_steps, b_steps;
  f_steps.reserve(n);
  b_steps.reserve(n);
  std::vector<double> h(hidden, 0.0), c(hidden, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    f_steps.push_back(lstm_step(fwd, inputs[t], h, c));
    h = f_steps.back().h;
    c = f_steps.back().c;
  }
  std::fill(h.begin(), h.end(), 0.0);
  std::fill(c.begin(), c.end(), 0.0);
  for (std::size_t t = n; t-- > 0;) {
    b_steps.push_back(lstm_step(bwd, inputs[t], h, c));
    h = b_steps.back().h;
    c = b_steps.back().c;
  }
  std::vector<std::vector<double>> states(n, std::vector<double>(2 * hidden));
  for (std::size_t t = 0; t < n; ++t) {
    const auto& fh = f_steps[t].h;
    const auto& bh = b_steps[n - 1 - t].h;
    std::copy(fh.begin(), fh.end(), states[t].begin());
    std::copy(bh.begin(), bh.end(), states[t].begin() + static_cast<std::ptrdiff_t>(hidden));
  }
  if (cache) {
    cache->forward = std::move(f_steps);
    cache->backward = std::move(b_steps);
  }
  return states;
}

std::vector<std::vector<double>> bilstm_backward(const LstmParams& fwd, const LstmParams& bwd,
                                                 const BiLstmCache& cache,
                                                 const std::vector<std::vector<double>>& d_states) {
  const std::size_t n = d_states.size();
  const std::size_t hidden = fwd.wh->cols();
  std::vector<std::vector<double>> d_fwd(n), d_bwd(n);
  for (std::size_t t = 0; t < n; ++t) {
    d_fwd[t].assign(d_states[t].begin(), d_states[t].begin() + static_cast<std::ptrdiff_t>(hidden));
    d_bwd[n - 1 - t].assign(d_states[t].begin() + static_cast<std::ptrdiff_t>(hidden),
                            d_states[t].end());
  }
  auto dx_f = lstm_backward(fwd, cache.forward, d_fwd);
  auto dx_b = lstm_backward(bwd, cache.backward, d_bwd);
  std::vector<std::vector<double>> d_inputs(n);
  for (std::size_t t = 0; t < n; ++t) {
    d_inputs[t] = dx_f[t];
    const auto& other = dx_b[n - 1 - t];
    for (std::size_t c = 0; c < other.size(); ++c) d_inputs[t][c] += other[c];
  }
  return d_inputs;
}

}  // namespace reliefir
