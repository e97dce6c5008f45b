#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace reliefir {

struct Tweet {
  std::string id;
  std::string text;
  std::size_t ingest_rank = 0;
};

// A tweet after case folding, stopword/URL/mention removal and stemming.
// `text` keeps the raw text so pattern baselines can still see the surface
// form after the corpus has been written out and read back.
struct ProcessedTweet {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  std::set<std::string> bag;
};

enum class InputFormat { kJsonl, kTsv };

enum class KeepPolicy { kKeepEarliest };

struct DedupConfig {
  double jaccard_threshold = 0.7;
  KeepPolicy keep_policy = KeepPolicy::kKeepEarliest;
};

using StopwordSet = std::unordered_set<std::string>;
using Stemmer = std::function<std::string(std::string_view)>;

// Reads one tweet per line. Blank lines are skipped but still count toward
// the line numbers reported in errors. Throws DataError on malformed lines or
// repeated ids.
std::vector<Tweet> ingest(const std::filesystem::path& path,
                          InputFormat format);
std::vector<Tweet> ingest_jsonl(std::istream& in);
std::vector<Tweet> ingest_tsv(std::istream& in);

InputFormat parse_input_format(std::string_view name);

// One lowercase term per line; lines starting with '#' are comments.
StopwordSet load_stopwords(const std::filesystem::path& path);

// The list shipped in data/stopwords.txt.
std::filesystem::path default_stopwords_path();

// Whitespace split, URLs and @-mentions dropped, leading/trailing ASCII
// punctuation stripped (so '#' of hashtags goes), ASCII lowercased. Interior
// characters such as apostrophes, digits and '/' are kept.
std::vector<std::string> tokenize(std::string_view text);

ProcessedTweet preprocess(const Tweet& tweet, const StopwordSet& stopwords,
                          const Stemmer& stemmer);

std::vector<ProcessedTweet> preprocess_all(const std::vector<Tweet>& tweets,
                                           const StopwordSet& stopwords,
                                           const Stemmer& stemmer);

// |a ∩ b| / |a ∪ b|, with 1.0 for two empty sets.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Greedy scan in input order: a tweet survives iff its bag is below the
// threshold against every tweet kept so far.
std::vector<ProcessedTweet> dedup(const std::vector<ProcessedTweet>& corpus,
                                  const DedupConfig& cfg);

// Processed corpus file: JSONL with "id", "text" and "tokens".
void write_processed(const std::filesystem::path& path,
                     const std::vector<ProcessedTweet>& corpus);
std::vector<ProcessedTweet> read_processed(const std::filesystem::path& path);

}  // namespace reliefir
