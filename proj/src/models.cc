#include "reliefir/models.h"

#include <cmath>
#include <random>

#include "reliefir/attention.h"
#include "reliefir/bilstm.h"
#include "reliefir/errors.h"

namespace reliefir {

namespace {

constexpr const char* kWord = "word";
constexpr const char* kWordNodes = "word_nodes";
constexpr const char* kChar = "char";
constexpr const char* kCharNodes = "char_nodes";
constexpr const char* kMix = "mix";
constexpr const char* kAttnProj = "attn_proj";
constexpr const char* kAttnV = "attn_v";
constexpr const char* kLstm = "lstm";

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(sigmoid(x)) without overflow for large |x|.
double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void fill_uniform(ParamTensor& t, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& x : t.values()) x = dist(rng);
}

bool uses_attention(ModelKind k) { return k == ModelKind::kWca || k == ModelKind::kWcal; }
bool learns_mix(ModelKind k) {
  return k == ModelKind::kWc || k == ModelKind::kWca || k == ModelKind::kWcal;
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kW2v: return "w2v";
    case ModelKind::kWc: return "wc";
    case ModelKind::kWcal: return "wcal";
    case ModelKind::kWca: return "wca";
    case ModelKind::kWcind: return "wcind";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : all_model_kinds())
    if (model_kind_name(k) == name) return k;
  throw ConfigError("unknown model kind: " + std::string(name));
}

std::vector<ModelKind> all_model_kinds() {
  return {ModelKind::kW2v, ModelKind::kWc, ModelKind::kWcal, ModelKind::kWca, ModelKind::kWcind};
}

TrainingConfig default_config(ModelKind kind) {
  TrainingConfig c;
  switch (kind) {
    case ModelKind::kW2v:
      c.optimizer = OptimizerKind::kSgd;
      c.lr_word = c.lr_char = 0.5;
      break;
    case ModelKind::kWc:
      c.optimizer = OptimizerKind::kAdam;
      c.lr_word = c.lr_char = 0.5;
      break;
    case ModelKind::kWcal:
      c.optimizer = OptimizerKind::kAdam;
      c.lr_word = c.lr_char = 0.5;
      c.d_chr = 128;
      c.epochs = 12;
      c.grad_clip = 5.0;
      break;
    case ModelKind::kWca:
      c.optimizer = OptimizerKind::kAdam;
      c.lr_word = 0.5;
      c.lr_char = 0.005;
      break;
    case ModelKind::kWcind:
      c.optimizer = OptimizerKind::kSgd;
      c.lr_word = 1.0;
      c.lr_char = 0.05;
      c.fixed_lambda = 0.7;
      break;
  }
  return c;
}

void TrainingConfig::validate(ModelKind kind) const {
  if (d_wrd < 1 || d_chr < 1) throw ConfigError("embedding dimensions must be >= 1");
  if (window < 1 || char_window < 1) throw ConfigError("window must be >= 1");
  if (!(lr_word > 0.0) || !(lr_char > 0.0)) throw ConfigError("learning rates must be > 0");
  if (!(adam_eps >= 0.0)) throw ConfigError("adam_eps must be >= 0");
  if (!(fixed_lambda >= 0.0 && fixed_lambda <= 1.0))
    throw ConfigError("fixed lambda must lie in [0,1]");
  if (!(grad_clip >= 0.0)) throw ConfigError("grad_clip must be >= 0");
  if (kind == ModelKind::kWcal) {
    if (2 * d_chr != d_wrd)
      throw ConfigError("wcal needs d_wrd = 2 * d_chr (biLSTM states are concatenated)");
  } else if (kind != ModelKind::kW2v && d_chr != d_wrd) {
    throw ConfigError(std::string(model_kind_name(kind)) + " needs d_chr = d_wrd");
  }
}

struct EmbeddingModel::Composition {
  Vector embedding;
  std::optional<std::size_t> word;
  std::vector<std::size_t> chars;
  bool use_word = false;
  bool use_chars = false;
  double lambda = 1.0;
  Vector char_vec;
  std::vector<Vector> char_inputs;
  std::vector<Vector> states;
  AttentionCache attention;
  BiLstmCache lstm;
};

EmbeddingModel::EmbeddingModel(ModelKind kind, Vocabulary vocab, TrainingConfig config)
    : kind_(kind), vocab_(std::move(vocab)), config_(std::move(config)) {
  config_.validate(kind_);
  if (vocab_.size() < 2) throw DataError("model needs a vocabulary of at least 2 words");
  huffman_ = build_huffman(vocab_);
  if (has_chars()) {
    if (vocab_.char_size() == 0) throw DataError("model needs a character inventory");
    word_chars_.reserve(vocab_.size());
    for (const auto& e : vocab_.words()) word_chars_.push_back(vocab_.char_indices(e.term));
  }
  if (kind_ == ModelKind::kWcind && vocab_.char_size() >= 2)
    char_huffman_ = build_huffman(vocab_.char_counts());
  init_params();
}

std::size_t EmbeddingModel::attended_dim() const {
  return kind_ == ModelKind::kWcal ? 2 * config_.d_chr : config_.d_chr;
}

void EmbeddingModel::init_params() {
  std::mt19937_64 rng(config_.seed);
  const std::size_t v = vocab_.size();
  fill_uniform(params_.add(kWord, {v, config_.d_wrd}), 0.5 / config_.d_wrd, rng);
  params_.add(kWordNodes, {v - 1, config_.d_wrd});
  if (has_chars()) {
    fill_uniform(params_.add(kChar, {vocab_.char_size(), config_.d_chr}), 0.5 / config_.d_chr,
                 rng);
  }
  if (kind_ == ModelKind::kWcind && char_huffman_)
    params_.add(kCharNodes, {vocab_.char_size() - 1, config_.d_chr});
  if (learns_mix(kind_)) params_.add(kMix, {1});
  if (kind_ == ModelKind::kWcal) {
    add_bilstm_params(params_, kLstm, config_.d_chr, config_.d_chr);
    for (const char* name : {"lstm_fwd_wx", "lstm_fwd_wh", "lstm_bwd_wx", "lstm_bwd_wh"})
      fill_uniform(params_.get(name), 0.05, rng);
  }
  if (uses_attention(kind_)) {
    std::size_t in = attended_dim();
    std::size_t a = config_.attention_dim ? config_.attention_dim : in;
    fill_uniform(params_.add(kAttnProj, {a, in}), 0.05, rng);
    fill_uniform(params_.add(kAttnV, {a}), 0.05, rng);
  }
  params_.round_to_storage();
}

double EmbeddingModel::lambda() const {
  if (kind_ == ModelKind::kW2v) return 1.0;
  if (kind_ == ModelKind::kWcind) return config_.fixed_lambda;
  return sigmoid(params_.get(kMix).values()[0]);
}

EmbeddingModel::Composition EmbeddingModel::compose(std::optional<std::size_t> word,
                                                    std::span<const std::size_t> chars,
                                                    bool keep_cache) const {
  Composition comp;
  comp.word = word;
  comp.chars.assign(chars.begin(), chars.end());
  comp.use_word = word.has_value();
  comp.use_chars = has_chars() && !chars.empty();
  const std::size_t d = config_.d_wrd;

  if (comp.use_chars) {
    const ParamTensor& table = params_.get(kChar);
    comp.char_inputs.reserve(chars.size());
    for (std::size_t c : chars) {
      auto row = table.row(c);
      comp.char_inputs.emplace_back(row.begin(), row.end());
    }
    switch (kind_) {
      case ModelKind::kWc:
      case ModelKind::kWcind: {
        comp.char_vec.assign(d, 0.0);
        for (const auto& x : comp.char_inputs)
          for (std::size_t k = 0; k < d; ++k) comp.char_vec[k] += x[k];
        for (double& x : comp.char_vec) x /= static_cast<double>(chars.size());
        break;
      }
      case ModelKind::kWca:
        comp.char_vec = attention_forward(params_.get(kAttnProj), params_.get(kAttnV),
                                          comp.char_inputs, keep_cache ? &comp.attention : nullptr);
        break;
      case ModelKind::kWcal: {
        auto fwd = lstm_weights(params_, kLstm, "fwd");
        auto bwd = lstm_weights(params_, kLstm, "bwd");
        comp.states = bilstm_forward(fwd, bwd, comp.char_inputs, keep_cache ? &comp.lstm : nullptr);
        comp.char_vec = attention_forward(params_.get(kAttnProj), params_.get(kAttnV), comp.states,
                                          keep_cache ? &comp.attention : nullptr);
        break;
      }
      case ModelKind::kW2v:
        break;
    }
  }

  if (comp.use_word && comp.use_chars) {
    comp.lambda = lambda();
    auto w = params_.get(kWord).row(*word);
    comp.embedding.resize(d);
    for (std::size_t k = 0; k < d; ++k)
      comp.embedding[k] = comp.lambda * w[k] + (1.0 - comp.lambda) * comp.char_vec[k];
  } else if (comp.use_word) {
    comp.lambda = 1.0;
    auto w = params_.get(kWord).row(*word);
    comp.embedding.assign(w.begin(), w.end());
  } else if (comp.use_chars) {
    comp.lambda = 0.0;
    comp.embedding = comp.char_vec;
  }
  return comp;
}

void EmbeddingModel::backprop(const Composition& comp, std::span<const double> d_embedding) {
  const std::size_t d = config_.d_wrd;
  Vector d_char(d, 0.0);
  if (comp.use_word && comp.use_chars) {
    auto w = params_.get(kWord).row(*comp.word);
    auto gw = params_.get(kWord).grad_row(*comp.word);
    double d_lambda = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      gw[k] += comp.lambda * d_embedding[k];
      d_char[k] = (1.0 - comp.lambda) * d_embedding[k];
      d_lambda += d_embedding[k] * (w[k] - comp.char_vec[k]);
    }
    if (learns_mix(kind_))
      params_.get(kMix).grad_row(0)[0] += d_lambda * comp.lambda * (1.0 - comp.lambda);
  } else if (comp.use_word) {
    auto gw = params_.get(kWord).grad_row(*comp.word);
    for (std::size_t k = 0; k < d; ++k) gw[k] += d_embedding[k];
    return;
  } else if (comp.use_chars) {
    d_char.assign(d_embedding.begin(), d_embedding.end());
  } else {
    return;
  }

  ParamTensor& table = params_.get(kChar);
  std::vector<Vector> d_inputs;
  switch (kind_) {
    case ModelKind::kWc:
    case ModelKind::kWcind: {
      double inv = 1.0 / static_cast<double>(comp.chars.size());
      for (std::size_t c : comp.chars) {
        auto g = table.grad_row(c);
        for (std::size_t k = 0; k < d; ++k) g[k] += d_char[k] * inv;
      }
      return;
    }
    case ModelKind::kWca:
      d_inputs = attention_backward(params_.get(kAttnProj), params_.get(kAttnV), comp.attention,
                                    d_char);
      break;
    case ModelKind::kWcal: {
      auto d_states = attention_backward(params_.get(kAttnProj), params_.get(kAttnV),
                                         comp.attention, d_char);
      auto fwd = lstm_params(params_, kLstm, "fwd");
      auto bwd = lstm_params(params_, kLstm, "bwd");
      d_inputs = bilstm_backward(fwd, bwd, comp.lstm, d_states);
      break;
    }
    case ModelKind::kW2v:
      return;
  }
  for (std::size_t j = 0; j < comp.chars.size(); ++j) {
    auto g = table.grad_row(comp.chars[j]);
    for (std::size_t k = 0; k < d_inputs[j].size(); ++k) g[k] += d_inputs[j][k];
  }
}

std::optional<Vector> EmbeddingModel::try_token_embedding(std::string_view token) const {
  auto word = vocab_.word_index(token);
  if (!has_chars()) {
    if (!word) return std::nullopt;
    auto row = params_.get(kWord).row(*word);
    return Vector(row.begin(), row.end());
  }
  std::vector<std::size_t> chars = word ? word_chars_[*word] : vocab_.char_indices(token);
  Composition comp = compose(word, chars, false);
  if (comp.embedding.empty()) return std::nullopt;
  return std::move(comp.embedding);
}

Vector EmbeddingModel::token_embedding(std::string_view token) const {
  auto v = try_token_embedding(token);
  if (!v) throw DataError("unembeddable token: " + std::string(token));
  return std::move(*v);
}

std::optional<Vector> EmbeddingModel::text_embedding(std::span<const std::string> tokens) const {
  Vector sum;
  std::size_t n = 0;
  for (const auto& token : tokens) {
    auto v = try_token_embedding(token);
    if (!v) continue;
    if (sum.empty()) sum.assign(v->size(), 0.0);
    for (std::size_t k = 0; k < v->size(); ++k) sum[k] += (*v)[k];
    ++n;
  }
  if (n == 0) return std::nullopt;
  for (double& x : sum) x /= static_cast<double>(n);
  return sum;
}

std::vector<double> EmbeddingModel::attention_weights(std::string_view token) const {
  if (!uses_attention(kind_)) throw ConfigError("model kind has no attention layer");
  auto word = vocab_.word_index(token);
  std::vector<std::size_t> chars = word ? word_chars_[*word] : vocab_.char_indices(token);
  if (chars.empty()) return {};
  Composition comp = compose(word, chars, true);
  return comp.attention.alpha;
}

std::optional<Vector> EmbeddingModel::char_branch(std::string_view token) const {
  if (!has_chars()) return std::nullopt;
  auto word = vocab_.word_index(token);
  std::vector<std::size_t> chars = word ? word_chars_[*word] : vocab_.char_indices(token);
  if (chars.empty()) return std::nullopt;
  return compose(std::nullopt, chars, false).char_vec;
}

double EmbeddingModel::hs_loss(const ParamTensor& nodes, const HuffmanCode& tree,
                               std::span<const double> input, std::span<const std::size_t> targets,
                               std::vector<double>* d_input, ParamTensor* grad_nodes) const {
  if (targets.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(targets.size());
  double total = 0.0;
  for (std::size_t target : targets) {
    const auto& path = tree.paths[target];
    const auto& code = tree.codes[target];
    for (std::size_t i = 0; i < path.size(); ++i) {
      auto node = nodes.row(path[i]);
      double sign = code[i] == 0 ? 1.0 : -1.0;
      double z = dot(node, input);
      total -= log_sigmoid(sign * z);
      if (d_input) {
        // d/dz of -log sigmoid(sign * z)
        double dz = -sign * (1.0 - sigmoid(sign * z)) * scale;
        auto g = grad_nodes->grad_row(path[i]);
        for (std::size_t k = 0; k < input.size(); ++k) {
          (*d_input)[k] += dz * node[k];
          g[k] += dz * input[k];
        }
      }
    }
  }
  return total * scale;
}

double EmbeddingModel::hs_probability(std::span<const double> input, std::size_t target) const {
  std::size_t t = target;
  return std::exp(-hs_loss(params_.get(kWordNodes), huffman_, input, {&t, 1}, nullptr, nullptr));
}

double EmbeddingModel::char_hs_probability(std::span<const double> input,
                                           std::size_t target) const {
  if (!char_huffman_) throw ConfigError("model has no character output tree");
  std::size_t t = target;
  return std::exp(
      -hs_loss(params_.get(kCharNodes), *char_huffman_, input, {&t, 1}, nullptr, nullptr));
}

double EmbeddingModel::pair_loss(std::size_t center, std::span<const std::size_t> contexts) const {
  if (kind_ == ModelKind::kWcind || kind_ == ModelKind::kW2v) {
    return hs_loss(params_.get(kWordNodes), huffman_, params_.get(kWord).row(center), contexts,
                   nullptr, nullptr);
  }
  Composition comp = compose(center, word_chars_[center], false);
  return hs_loss(params_.get(kWordNodes), huffman_, comp.embedding, contexts, nullptr, nullptr);
}

double EmbeddingModel::pair_loss_and_grad(std::size_t center,
                                          std::span<const std::size_t> contexts) {
  ParamTensor& nodes = params_.get(kWordNodes);
  if (kind_ == ModelKind::kWcind || kind_ == ModelKind::kW2v) {
    auto row = params_.get(kWord).row(center);
    Vector input(row.begin(), row.end());
    Vector d_input(input.size(), 0.0);
    double loss = hs_loss(nodes, huffman_, input, contexts, &d_input, &nodes);
    auto g = params_.get(kWord).grad_row(center);
    for (std::size_t k = 0; k < d_input.size(); ++k) g[k] += d_input[k];
    return loss;
  }
  Composition comp = compose(center, word_chars_[center], true);
  Vector d_input(comp.embedding.size(), 0.0);
  double loss = hs_loss(nodes, huffman_, comp.embedding, contexts, &d_input, &nodes);
  backprop(comp, d_input);
  return loss;
}

double EmbeddingModel::char_pair_loss(std::size_t center,
                                      std::span<const std::size_t> contexts) const {
  if (!char_huffman_) throw ConfigError("model has no character output tree");
  return hs_loss(params_.get(kCharNodes), *char_huffman_, params_.get(kChar).row(center), contexts,
                 nullptr, nullptr);
}

double EmbeddingModel::char_pair_loss_and_grad(std::size_t center,
                                               std::span<const std::size_t> contexts) {
  if (!char_huffman_) throw ConfigError("model has no character output tree");
  ParamTensor& nodes = params_.get(kCharNodes);
  auto row = params_.get(kChar).row(center);
  Vector input(row.begin(), row.end());
  Vector d_input(input.size(), 0.0);
  double loss = hs_loss(nodes, *char_huffman_, input, contexts, &d_input, &nodes);
  auto g = params_.get(kChar).grad_row(center);
  for (std::size_t k = 0; k < d_input.size(); ++k) g[k] += d_input[k];
  return loss;
}

void EmbeddingModel::reset_optimizer() {
  steps_ = 0;
  for (auto& [_, t] : params_.tensors()) t.reset_optimizer_state();
}

void EmbeddingModel::apply_step() {
  ++steps_;
  for (auto& [name, t] : params_.tensors()) {
    if (t.touched_rows().empty()) continue;
    if (config_.grad_clip > 0.0) clip_grad(t, config_.grad_clip);
    bool word_side = name == kWord || name == kWordNodes;
    double lr = word_side ? config_.lr_word : config_.lr_char;
    if (config_.optimizer == OptimizerKind::kSgd) {
      sgd_step(t, lr);
    } else {
      AdamConfig adam{lr, config_.adam_beta1, config_.adam_beta2, config_.adam_eps};
      adam_step(t, adam, steps_);
    }
  }
}

std::vector<EpochStats> EmbeddingModel::train(const std::vector<ProcessedTweet>& corpus,
                                              std::optional<std::size_t> epochs) {
  if (corpus.empty()) throw DataError("cannot train on an empty corpus");
  const std::size_t n_epochs = epochs.value_or(config_.epochs);

  std::vector<std::vector<std::size_t>> sequences;
  sequences.reserve(corpus.size());
  for (const auto& tweet : corpus) {
    std::vector<std::size_t> seq;
    for (const auto& tok : tweet.tokens)
      if (auto idx = vocab_.word_index(tok)) seq.push_back(*idx);
    sequences.push_back(std::move(seq));
  }

  std::vector<EpochStats> log;
  std::vector<std::size_t> contexts;
  const long window = static_cast<long>(config_.window);
  const long char_window = static_cast<long>(config_.char_window);
  for (std::size_t epoch = 1; epoch <= n_epochs; ++epoch) {
    EpochStats stats;
    stats.epoch = epoch;
    double loss_sum = 0.0;
    double char_loss_sum = 0.0;
    std::size_t step = 0;
    for (const auto& seq : sequences) {
      const long n = static_cast<long>(seq.size());
      for (long i = 0; i < n; ++i) {
        contexts.clear();
        for (long j = std::max(0L, i - window); j <= std::min(n - 1, i + window); ++j)
          if (j != i) contexts.push_back(seq[j]);
        if (contexts.empty()) continue;
        double loss = pair_loss_and_grad(seq[i], contexts);
        ++step;
        if (!std::isfinite(loss))
          throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                             std::to_string(step));
        apply_step();
        loss_sum += loss * static_cast<double>(contexts.size());
        stats.pairs += contexts.size();
      }
      if (kind_ != ModelKind::kWcind || !char_huffman_) continue;
      for (std::size_t w : seq) {
        const auto& chars = word_chars_[w];
        const long m = static_cast<long>(chars.size());
        for (long i = 0; i < m; ++i) {
          contexts.clear();
          for (long j = std::max(0L, i - char_window); j <= std::min(m - 1, i + char_window); ++j)
            if (j != i) contexts.push_back(chars[j]);
          if (contexts.empty()) continue;
          double loss = char_pair_loss_and_grad(chars[i], contexts);
          ++step;
          if (!std::isfinite(loss))
            throw NumericError("non-finite character loss at epoch " + std::to_string(epoch) +
                               ", step " + std::to_string(step));
          apply_step();
          char_loss_sum += loss * static_cast<double>(contexts.size());
          stats.char_pairs += contexts.size();
        }
      }
    }
    stats.mean_loss = stats.pairs ? loss_sum / static_cast<double>(stats.pairs) : 0.0;
    stats.mean_char_loss =
        stats.char_pairs ? char_loss_sum / static_cast<double>(stats.char_pairs) : 0.0;
    log.push_back(stats);
  }
  params_.round_to_storage();
  return log;
}

}  // namespace reliefir
