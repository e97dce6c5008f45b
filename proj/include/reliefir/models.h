#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reliefir/corpus.h"
#include "reliefir/optim.h"
#include "reliefir/vocab.h"

namespace reliefir {

enum class ModelKind : std::uint32_t { kW2v = 0, kWc = 1, kWcal = 2, kWca = 3, kWcind = 4 };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
std::vector<ModelKind> all_model_kinds();

struct TrainingConfig {
  std::size_t d_wrd = 256;
  std::size_t d_chr = 256;
  std::size_t window = 5;
  double lr_word = 0.5;
  double lr_char = 0.5;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double adam_beta1 = 0.001;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t epochs = 8;
  std::uint64_t seed = 1;

  std::size_t min_count = 5;
  // Character skip-gram window (WCInd only).
  std::size_t char_window = 5;
  // Fixed word/char mixing weight (WCInd only).
  double fixed_lambda = 0.7;
  // Attention projection size; 0 means "same as the attended vectors".
  std::size_t attention_dim = 0;
  // Element-wise gradient clip; 0 disables.
  double grad_clip = 0.0;

  void validate(ModelKind kind) const;
  bool operator==(const TrainingConfig&) const = default;
};

// Hyperparameters as published for each model kind.
TrainingConfig default_config(ModelKind kind);

struct EpochStats {
  std::size_t epoch = 0;
  double mean_loss = 0.0;       // word-level hierarchical softmax NLL per pair
  std::size_t pairs = 0;
  double mean_char_loss = 0.0;  // WCInd character skip-gram, else 0
  std::size_t char_pairs = 0;
};

using Vector = std::vector<double>;

// One of the five embedding models behind a shared interface. Inference
// methods are const and safe to call concurrently; training mutates.
class EmbeddingModel {
 public:
  // Freshly initialized parameters drawn from config.seed.
  EmbeddingModel(ModelKind kind, Vocabulary vocab, TrainingConfig config);

  ModelKind kind() const { return kind_; }
  const Vocabulary& vocab() const { return vocab_; }
  const HuffmanCode& huffman() const { return huffman_; }
  const TrainingConfig& config() const { return config_; }
  TrainingConfig& mutable_config() { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  bool has_chars() const { return kind_ != ModelKind::kW2v; }

  // Current word/char mixing weight (learned or fixed); 1 for W2V.
  double lambda() const;

  std::optional<Vector> try_token_embedding(std::string_view token) const;
  // Throws DataError("unembeddable token ...") when the token has neither a
  // word row nor any known character.
  Vector token_embedding(std::string_view token) const;
  // Mean of the embeddable tokens; nullopt when none are embeddable.
  std::optional<Vector> text_embedding(std::span<const std::string> tokens) const;

  // Attention weights over the token's known characters (WCA/WCAL only).
  std::vector<double> attention_weights(std::string_view token) const;
  // The character-composed part of the embedding before mixing.
  std::optional<Vector> char_branch(std::string_view token) const;

  // Probability of `target` under the word Huffman tree given `input`.
  double hs_probability(std::span<const double> input, std::size_t target) const;
  // Same over the character tree (WCInd only).
  double char_hs_probability(std::span<const double> input, std::size_t target) const;

  // Runs `epochs` passes (config.epochs when omitted) in corpus order.
  std::vector<EpochStats> train(const std::vector<ProcessedTweet>& corpus,
                                std::optional<std::size_t> epochs = std::nullopt);

  // Mean hierarchical-softmax loss of predicting each context word from the
  // center word's composed embedding. The _and_grad variant also
  // accumulates gradients (no optimizer step).
  double pair_loss(std::size_t center, std::span<const std::size_t> contexts) const;
  double pair_loss_and_grad(std::size_t center, std::span<const std::size_t> contexts);
  // Character skip-gram counterpart for WCInd.
  double char_pair_loss(std::size_t center, std::span<const std::size_t> contexts) const;
  double char_pair_loss_and_grad(std::size_t center, std::span<const std::size_t> contexts);

  // Resets Adam moments and the step counter.
  void reset_optimizer();

 private:
  struct Composition;

  void init_params();
  std::size_t attended_dim() const;
  Composition compose(std::optional<std::size_t> word, std::span<const std::size_t> chars,
                      bool keep_cache) const;
  void backprop(const Composition& comp, std::span<const double> d_embedding);
  double hs_loss(const ParamTensor& nodes, const HuffmanCode& tree,
                 std::span<const double> input, std::span<const std::size_t> targets,
                 std::vector<double>* d_input, ParamTensor* grad_nodes) const;
  void apply_step();

  ModelKind kind_;
  Vocabulary vocab_;
  TrainingConfig config_;
  HuffmanCode huffman_;
  std::optional<HuffmanCode> char_huffman_;
  std::vector<std::vector<std::size_t>> word_chars_;
  ParamStore params_;
  std::uint64_t steps_ = 0;
};

}  // namespace reliefir
