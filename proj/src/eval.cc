#include "reliefir/eval.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "reliefir/errors.h"

namespace reliefir {

const std::set<std::string>& Qrels::for_query(const std::string& label) const {
  static const std::set<std::string> kEmpty;
  auto it = relevant.find(label);
  return it == relevant.end() ? kEmpty : it->second;
}

Qrels Qrels::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open qrels " + path.string());
  Qrels qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string qid, iter, docid;
    int rel = 0;
    if (!(fields >> qid >> iter >> docid >> rel) || (rel != 0 && rel != 1))
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed qrels line");
    auto& set = qrels.relevant[qid];
    if (rel == 1) set.insert(docid);
  }
  return qrels;
}

double f_measure(double precision, double recall) {
  if (precision <= 0.0 || recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double average_precision(const RankedList& rl, const std::set<std::string>& relevant) {
  if (relevant.empty()) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rl.entries.size(); ++i) {
    if (!relevant.count(rl.entries[i].id)) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(relevant.size());
}

EvalReport evaluate_ranked(const RankedList& rl, const Qrels& qrels) {
  std::unordered_set<std::string> seen;
  for (const auto& e : rl.entries)
    if (!seen.insert(e.id).second)
      throw DataError("duplicate id " + e.id + " in ranking for '" + rl.query_label + "'");

  const auto& rel = qrels.for_query(rl.query_label);
  EvalReport r;
  r.query = rl.query_label;
  r.retrieved = rl.entries.size();
  r.relevant = rel.size();
  std::size_t hits_100 = 0, hits_1000 = 0;
  for (std::size_t i = 0; i < rl.entries.size() && i < 1000; ++i) {
    if (!rel.count(rl.entries[i].id)) continue;
    ++hits_1000;
    if (i < 100) ++hits_100;
  }
  r.relevant_retrieved = hits_1000;
  r.precision_at_100 = static_cast<double>(hits_100) / 100.0;
  r.recall_at_1000 = rel.empty() ? 0.0 : static_cast<double>(hits_1000) / rel.size();
  r.f_score = f_measure(r.precision_at_100, r.recall_at_1000);
  r.map = average_precision(rl, rel);
  return r;
}

EvalReport evaluate_set(const std::string& label, const std::vector<std::string>& ids,
                        const Qrels& qrels) {
  const auto& rel = qrels.for_query(label);
  std::set<std::string> unique(ids.begin(), ids.end());
  std::size_t hits = 0;
  for (const auto& id : unique) hits += rel.count(id);
  EvalReport r;
  r.query = label;
  r.retrieved = unique.size();
  r.relevant = rel.size();
  r.relevant_retrieved = hits;
  r.precision_at_100 = unique.empty() ? 0.0 : static_cast<double>(hits) / unique.size();
  r.recall_at_1000 = rel.empty() ? 0.0 : static_cast<double>(hits) / rel.size();
  r.f_score = f_measure(r.precision_at_100, r.recall_at_1000);
  return r;
}

std::string format_report_lines(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  char buf[32];
  auto emit = [&](const char* measure, const std::string& q, double v) {
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    out << measure << '\t' << q << '\t' << buf << '\n';
  };
  for (const auto& r : reports) {
    emit("P_100", r.query, r.precision_at_100);
    emit("recall_1000", r.query, r.recall_at_1000);
    emit("F", r.query, r.f_score);
    if (r.map) emit("map", r.query, *r.map);
    out << "num_ret\t" << r.query << '\t' << r.retrieved << '\n';
    out << "num_rel\t" << r.query << '\t' << r.relevant << '\n';
    out << "num_rel_ret\t" << r.query << '\t' << r.relevant_retrieved << '\n';
  }
  return out.str();
}

std::string format_report_table(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-12s %8s %8s %8s %8s\n", "query", "Prec", "Recall", "F-score",
                "MAP");
  out << buf;
  for (const auto& r : reports) {
    char map_buf[16];
    if (r.map)
      std::snprintf(map_buf, sizeof(map_buf), "%.4f", *r.map);
    else
      std::snprintf(map_buf, sizeof(map_buf), "--");
    std::snprintf(buf, sizeof(buf), "%-12s %8.4f %8.4f %8.4f %8s\n", r.query.c_str(),
                  r.precision_at_100, r.recall_at_1000, r.f_score, map_buf);
    out << buf;
  }
  return out.str();
}

}  // namespace reliefir
