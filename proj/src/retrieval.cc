#include "reliefir/retrieval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "reliefir/errors.h"

namespace reliefir {

Query need_query() { return {"need", {"need", "requir"}}; }
Query availability_query() { return {"avail", {"avail", "distribut", "send"}}; }

RankedList RankedList::truncated(std::size_t k) const {
  RankedList out{query_label, {}};
  out.entries.assign(entries.begin(),
                     entries.begin() + static_cast<std::ptrdiff_t>(std::min(k, entries.size())));
  return out;
}

std::optional<double> cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return std::nullopt;
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

RankedList rank_by_cosine(const std::string& label, std::span<const double> query,
                          const std::vector<std::string>& ids,
                          const std::vector<std::optional<Vector>>& vectors,
                          std::size_t threads) {
  const std::size_t n = ids.size();
  std::vector<std::optional<double>> scores(n);
  auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      if (vectors[i]) scores[i] = cosine(query, *vectors[i]);
  };
  if (threads <= 1 || n < 2 * threads) {
    score_range(0, n);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      std::size_t begin = t * chunk;
      std::size_t end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(score_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  RankedList list{label, {}};
  list.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    list.entries.push_back({ids[i], scores[i] ? *scores[i] : kUnscored});
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    bool sa = scores[a].has_value(), sb = scores[b].has_value();
    if (sa != sb) return sa;
    if (sa && *scores[a] != *scores[b]) return *scores[a] > *scores[b];
    return ids[a] < ids[b];
  });
  RankedList sorted{label, {}};
  sorted.entries.reserve(n);
  for (std::size_t i : order) sorted.entries.push_back(list.entries[i]);
  return sorted;
}

std::vector<std::optional<Vector>> tweet_vectors(const EmbeddingModel& model,
                                                 const std::vector<ProcessedTweet>& corpus) {
  std::unordered_map<std::string, std::optional<Vector>> cache;
  auto lookup = [&](const std::string& term) -> const std::optional<Vector>& {
    auto it = cache.find(term);
    if (it == cache.end()) it = cache.emplace(term, model.try_token_embedding(term)).first;
    return it->second;
  };
  std::vector<std::optional<Vector>> out;
  out.reserve(corpus.size());
  for (const auto& tweet : corpus) {
    Vector sum;
    std::size_t n = 0;
    for (const auto& tok : tweet.tokens) {
      const auto& v = lookup(tok);
      if (!v) continue;
      if (sum.empty()) sum.assign(v->size(), 0.0);
      for (std::size_t k = 0; k < v->size(); ++k) sum[k] += (*v)[k];
      ++n;
    }
    if (n == 0) {
      out.emplace_back();
      continue;
    }
    for (double& x : sum) x /= static_cast<double>(n);
    out.emplace_back(std::move(sum));
  }
  return out;
}

RankedList rank(const EmbeddingModel& model, const std::vector<ProcessedTweet>& corpus,
                const Query& q, std::size_t threads) {
  auto qvec = model.text_embedding(q.terms);
  if (!qvec) throw DataError("query '" + q.label + "' has no embeddable term");
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const auto& t : corpus) ids.push_back(t.id);
  return rank_by_cosine(q.label, *qvec, ids, tweet_vectors(model, corpus), threads);
}

ExpansionResult expand_query_embedding(const EmbeddingModel& model,
                                       const std::vector<ProcessedTweet>& corpus, const Query& q,
                                       const RankedList& initial, const ExpansionConfig& cfg) {
  if (cfg.k_top_docs < 1 || cfg.p_terms < 1)
    throw ConfigError("expansion needs k >= 1 and p >= 1");
  auto qvec = model.text_embedding(q.terms);
  if (!qvec) throw DataError("query '" + q.label + "' has no embeddable term");

  std::unordered_map<std::string, const ProcessedTweet*> by_id;
  for (const auto& t : corpus) by_id.emplace(t.id, &t);
  std::set<std::string> query_terms(q.terms.begin(), q.terms.end());
  std::set<std::string> candidates;
  std::size_t top = std::min(cfg.k_top_docs, initial.entries.size());
  for (std::size_t i = 0; i < top; ++i) {
    auto it = by_id.find(initial.entries[i].id);
    if (it == by_id.end()) continue;
    for (const auto& tok : it->second->tokens)
      if (!cfg.exclude_query_terms || !query_terms.count(tok)) candidates.insert(tok);
  }

  std::vector<std::pair<double, std::string>> scored;
  for (const auto& term : candidates) {
    auto v = model.try_token_embedding(term);
    if (!v) continue;
    if (auto c = cosine(*v, *qvec)) scored.emplace_back(*c, term);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  ExpansionResult result;
  result.query = q;
  for (std::size_t i = 0; i < std::min(cfg.p_terms, scored.size()); ++i) {
    result.added.push_back(scored[i].second);
    result.query.terms.push_back(scored[i].second);
  }
  if (result.added.size() < cfg.p_terms)
    result.warnings.push_back("only " + std::to_string(result.added.size()) + " of " +
                              std::to_string(cfg.p_terms) + " expansion terms available for '" +
                              q.label + "'");
  return result;
}

ExpansionResult expand_query_embedding(const EmbeddingModel& model,
                                       const std::vector<ProcessedTweet>& corpus, const Query& q,
                                       const ExpansionConfig& cfg) {
  return expand_query_embedding(model, corpus, q, rank(model, corpus, q), cfg);
}

void write_run(std::ostream& out, const RankedList& list, const std::string& tag) {
  char buf[64];
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", list.entries[i].score);
    out << list.query_label << " Q0 " << list.entries[i].id << ' ' << (i + 1) << ' ' << buf << ' '
        << tag << '\n';
  }
}

void write_run_file(const std::filesystem::path& path, const std::vector<RankedList>& lists,
                    const std::string& tag) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& list : lists) write_run(out, list, tag);
  if (!out) throw DataError("write failed: " + path.string());
}

std::map<std::string, RankedList> read_run_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open run file " + path.string());
  std::map<std::string, std::vector<std::pair<long, RankedEntry>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string qid, q0, docid, tag;
    long rank_no = 0;
    double score = 0.0;
    if (!(fields >> qid >> q0 >> docid >> rank_no >> score))
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed run line");
    rows[qid].push_back({rank_no, {docid, score}});
  }
  std::map<std::string, RankedList> lists;
  for (auto& [qid, entries] : rows) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    RankedList list{qid, {}};
    for (auto& [_, e] : entries) list.entries.push_back(std::move(e));
    lists.emplace(qid, std::move(list));
  }
  return lists;
}

}  // namespace reliefir
