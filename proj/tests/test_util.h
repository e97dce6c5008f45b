#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "reliefir/corpus.h"
#include "reliefir/models.h"

namespace reliefir::testing {

inline ProcessedTweet make_tweet(std::string id, std::vector<std::string> tokens,
                                 std::string text = "") {
  ProcessedTweet t;
  t.id = std::move(id);
  t.tokens = std::move(tokens);
  t.bag.insert(t.tokens.begin(), t.tokens.end());
  if (text.empty())
    for (const auto& tok : t.tokens) text += (text.empty() ? "" : " ") + tok;
  t.text = std::move(text);
  return t;
}

// Removes itself on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("reliefir_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Short words over a small alphabet: at most 20 words, at most 15 distinct
// characters, every word at most 6 characters.
inline std::vector<ProcessedTweet> tiny_corpus() {
  const std::vector<std::vector<std::string>> rows = {
      {"need", "water", "tent"},       {"send", "food", "water"},  {"need", "food", "aid"},
      {"tent", "need", "nepal"},       {"aid", "send", "rain"},    {"water", "tent", "aid", "need"},
      {"food", "nepal", "send"},       {"rain", "dew", "tent"},    {"need", "aid", "send", "wet"},
      {"wet", "rain", "dew", "nepal"},  {"mud", "road", "pond", "lamp"}, {"pump", "rope", "fuel"},
      {"tarp", "iron", "salt", "mud"},   {"road", "need", "fuel", "tarp"}, {"salt", "lamp", "pond"},
  };
  std::vector<ProcessedTweet> corpus;
  for (std::size_t i = 0; i < rows.size(); ++i)
    corpus.push_back(make_tweet("t" + std::to_string(i), rows[i]));
  return corpus;
}

inline TrainingConfig tiny_config(ModelKind kind, std::uint64_t seed = 3) {
  TrainingConfig c = default_config(kind);
  c.d_wrd = 8;
  c.d_chr = kind == ModelKind::kWcal ? 4 : 8;
  c.min_count = 1;
  c.epochs = 1;
  c.seed = seed;
  return c;
}

// Redraws every parameter uniformly in [-scale, scale] so gradients are
// far from the zero-initialized regime.
inline void randomize_params(EmbeddingModel& model, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& [name, t] : model.params().tensors())
    for (double& x : t.values()) x = u(rng);
}

}  // namespace reliefir::testing
