#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reliefir/corpus.h"
#include "reliefir/models.h"

namespace reliefir {

struct Query {
  std::string label;
  std::vector<std::string> terms;
};

// The two topic queries, already in stemmed form.
Query need_query();
Query availability_query();

// Score given to tweets that have no vector; sorts below every cosine.
inline constexpr double kUnscored = -2.0;

struct RankedEntry {
  std::string id;
  double score = kUnscored;

  bool operator==(const RankedEntry&) const = default;
};

// Scores non-increasing, ties by ascending id, ids unique.
struct RankedList {
  std::string query_label;
  std::vector<RankedEntry> entries;

  RankedList truncated(std::size_t k) const;
};

struct ExpansionConfig {
  std::size_t k_top_docs = 10;
  std::size_t p_terms = 3;
  bool exclude_query_terms = true;
};

struct ExpansionResult {
  Query query;
  std::vector<std::string> added;
  std::vector<std::string> warnings;
};

// Cosine similarity; nullopt if either vector has zero norm.
std::optional<double> cosine(std::span<const double> a, std::span<const double> b);

// Sorts documents by cosine to `query`. Documents without a vector (or with
// a zero vector) follow all scored documents, ordered by id.
RankedList rank_by_cosine(const std::string& label, std::span<const double> query,
                          const std::vector<std::string>& ids,
                          const std::vector<std::optional<Vector>>& vectors,
                          std::size_t threads = 1);

// Tweet vectors (mean of token embeddings), computed once per distinct term.
std::vector<std::optional<Vector>> tweet_vectors(const EmbeddingModel& model,
                                                 const std::vector<ProcessedTweet>& corpus);

// Full-corpus cosine ranking. Throws DataError if no query term is
// embeddable.
RankedList rank(const EmbeddingModel& model, const std::vector<ProcessedTweet>& corpus,
                const Query& q, std::size_t threads = 1);

// Appends the p candidate terms from the top-k tweets whose embeddings are
// closest (cosine) to the original query vector.
ExpansionResult expand_query_embedding(const EmbeddingModel& model,
                                       const std::vector<ProcessedTweet>& corpus, const Query& q,
                                       const RankedList& initial, const ExpansionConfig& cfg);
ExpansionResult expand_query_embedding(const EmbeddingModel& model,
                                       const std::vector<ProcessedTweet>& corpus, const Query& q,
                                       const ExpansionConfig& cfg);

// TREC run format: "qid Q0 docid rank score tag".
void write_run(std::ostream& out, const RankedList& list, const std::string& tag);
void write_run_file(const std::filesystem::path& path, const std::vector<RankedList>& lists,
                    const std::string& tag);
// Lists keyed by qid, entries ordered by the rank column.
std::map<std::string, RankedList> read_run_file(const std::filesystem::path& path);

}  // namespace reliefir
