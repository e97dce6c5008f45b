#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reliefir/models.h"

namespace reliefir {

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Binary layout (little-endian throughout):
//   magic "RLFIRMDL", u32 version, u32 kind,
//   config (u64 sizes, f64 reals, u32 optimizer),
//   u64 min_count, u64 #words, {u32 len, bytes, u64 count}*, same for chars,
//   u64 #tensors, {u32 len, name, u32 ndim, u64 dims..., f32 values...}*,
//   u32 crc32 of every preceding byte.
void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_model(const std::filesystem::path& path);

struct TensorInfo {
  std::string name;
  std::vector<std::uint64_t> shape;
};

struct ModelInfo {
  std::uint32_t version = 0;
  ModelKind kind = ModelKind::kW2v;
  TrainingConfig config;
  std::size_t words = 0;
  std::size_t chars = 0;
  std::vector<TensorInfo> tensors;
  std::uint32_t checksum = 0;
};

ModelInfo inspect_model(const std::filesystem::path& path);
std::string format_model_info(const ModelInfo& info);

enum class VocabPolicy { kTargetOnly, kUnion };
VocabPolicy parse_vocab_policy(std::string_view name);

struct TransferPlan {
  std::filesystem::path source;
  std::vector<ProcessedTweet> target;
  std::size_t retrain_epochs = 1;
  VocabPolicy vocab_policy = VocabPolicy::kTargetOnly;
  // When set, the source must be of this kind.
  std::optional<ModelKind> expected_kind;
};

struct WarmStartResult {
  EmbeddingModel model;
  std::vector<EpochStats> log;
  std::size_t copied_words = 0;
  std::size_t copied_chars = 0;
};

// Builds the target vocabulary, copies word and character rows that the
// source knows plus the vocabulary-independent tensors, keeps fresh
// output-node vectors for the new Huffman tree, then retrains.
WarmStartResult warm_start(const TransferPlan& plan);
WarmStartResult warm_start(const EmbeddingModel& source, const TransferPlan& plan);

}  // namespace reliefir
