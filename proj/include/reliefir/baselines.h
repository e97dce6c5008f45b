#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <regex>
#include <string>
#include <vector>

#include "reliefir/corpus.h"
#include "reliefir/retrieval.h"

namespace reliefir {

struct Pattern {
  std::string source;    // the expression as written in the file
  std::string category;  // empty when the line has no tab-separated tag
  std::size_t line = 0;
  std::regex compiled;
};

struct PatternSet {
  std::string name;
  std::vector<Pattern> patterns;

  // Pattern file: one expression per line, optional "<TAB>category", '#'
  // comments. "{Number}" expands to a run of digits. Throws ConfigError
  // naming the offending line when an expression does not compile.
  static PatternSet parse(std::istream& in, const std::string& name);
  static PatternSet load(const std::filesystem::path& path);

  bool matches(const std::string& raw_text) const;
};

inline constexpr std::uint64_t kDefaultPatternSeed = 42;

// Ids of tweets whose raw text matches any pattern, sorted ascending. When
// more than `cap` match, a seeded uniform sample of `cap` of them.
std::vector<std::string> pattern_match(const PatternSet& ps, const std::vector<ProcessedTweet>& corpus,
                                       std::size_t cap = 1000,
                                       std::uint64_t seed = kDefaultPatternSeed);
std::vector<std::string> pattern_match(const PatternSet& ps, const std::vector<Tweet>& corpus,
                                       std::size_t cap = 1000,
                                       std::uint64_t seed = kDefaultPatternSeed);

// Uniform sample without replacement, returned in ascending order.
std::vector<std::string> sample_ids(std::vector<std::string> ids, std::size_t cap,
                                    std::uint64_t seed);

// A match set as a run with every score 1.0.
RankedList match_set_as_run(const std::string& label, const std::vector<std::string>& ids);

struct LmConfig {
  double mu = 2500.0;
};

// Dirichlet-smoothed query likelihood. Query terms that never occur in the
// collection add the same constant to every document and are skipped.
RankedList lm_rank(const std::vector<ProcessedTweet>& corpus, const Query& q,
                   const LmConfig& cfg = {});

struct RocchioConfig {
  std::size_t k_top_docs = 10;
  std::size_t p_terms = 3;
};

struct RocchioTerm {
  std::string term;
  double score = 0.0;
};

// tf over the top-k tweets times ln(N/df) over the corpus, best first,
// query terms excluded.
std::vector<RocchioTerm> rocchio_scores(const std::vector<ProcessedTweet>& corpus, const Query& q,
                                        const RankedList& base, std::size_t k_top_docs);

ExpansionResult rocchio_expand(const std::vector<ProcessedTweet>& corpus, const Query& q,
                               const RankedList& base, const RocchioConfig& cfg = {});

}  // namespace reliefir
