#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "reliefir/corpus.h"
#include "test_util.h"

namespace reliefir::testing {

// Tweets drawn from topical clusters of words: each tweet picks one cluster
// and samples its tokens from it, with a little background noise.
// `rename` maps a word position to a different surface form, which lets
// two corpora share only part of their vocabulary.
inline std::vector<ProcessedTweet> cluster_corpus(std::size_t tweets, std::size_t clusters,
                                                  std::size_t cluster_size, std::uint64_t seed,
                                                  const std::string& prefix = "w",
                                                  std::size_t renamed_from = SIZE_MAX,
                                                  const std::string& renamed_prefix = "v") {
  std::mt19937_64 rng(seed);
  const std::size_t vocab = clusters * cluster_size;
  auto word = [&](std::size_t i) {
    return (i >= renamed_from ? renamed_prefix : prefix) + std::to_string(i);
  };
  std::vector<ProcessedTweet> out;
  for (std::size_t t = 0; t < tweets; ++t) {
    std::size_t c = rng() % clusters;
    std::size_t len = 4 + rng() % 6;
    std::vector<std::string> tokens;
    for (std::size_t k = 0; k < len; ++k) {
      std::size_t w = rng() % 10 == 0 ? rng() % vocab : c * cluster_size + rng() % cluster_size;
      tokens.push_back(word(w));
    }
    out.push_back(make_tweet(prefix + "_t" + std::to_string(t), tokens));
  }
  return out;
}

}  // namespace reliefir::testing
