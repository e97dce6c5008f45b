#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reliefir/retrieval.h"

namespace reliefir {

// Relevant tweet ids per query label.
struct Qrels {
  std::map<std::string, std::set<std::string>> relevant;

  const std::set<std::string>& for_query(const std::string& label) const;
  // TREC qrels: "qid 0 docid rel", rel in {0, 1}. Queries that only have
  // rel=0 lines are kept with an empty set.
  static Qrels load(const std::filesystem::path& path);
};

struct EvalReport {
  std::string query;
  double precision_at_100 = 0.0;
  double recall_at_1000 = 0.0;
  double f_score = 0.0;
  std::optional<double> map;  // absent for unordered match sets
  std::size_t retrieved = 0;
  std::size_t relevant = 0;
  std::size_t relevant_retrieved = 0;
};

// Harmonic mean, 0 when either side is 0.
double f_measure(double precision, double recall);

// AP over the full list; unretrieved relevant documents count as 0.
double average_precision(const RankedList& rl, const std::set<std::string>& relevant);

// Throws DataError on duplicate ids. Precision always divides by 100.
EvalReport evaluate_ranked(const RankedList& rl, const Qrels& qrels);
EvalReport evaluate_set(const std::string& label, const std::vector<std::string>& ids,
                        const Qrels& qrels);

// "measure<TAB>query<TAB>value" lines (P_100, recall_1000, F, map, counts).
std::string format_report_lines(const std::vector<EvalReport>& reports);
// Aligned table for people.
std::string format_report_table(const std::vector<EvalReport>& reports);

}  // namespace reliefir
