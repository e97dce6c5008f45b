#include "reliefir/baselines.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "reliefir/errors.h"

namespace reliefir {
namespace {

std::string expand_placeholders(std::string expr) {
  static const std::string kNumber = "{Number}";
  for (std::size_t pos = expr.find(kNumber); pos != std::string::npos;
       pos = expr.find(kNumber, pos)) {
    expr.replace(pos, kNumber.size(), "[0-9]+");
    pos += 6;
  }
  return expr;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
std::vector<std::string> match_impl(const PatternSet& ps, const std::vector<T>& corpus,
                                    std::size_t cap, std::uint64_t seed) {
  std::vector<std::string> hits;
  for (const auto& tweet : corpus)
    if (ps.matches(tweet.text)) hits.push_back(tweet.id);
  return sample_ids(std::move(hits), cap, seed);
}

}  // namespace

PatternSet PatternSet::parse(std::istream& in, const std::string& name) {
  PatternSet ps;
  ps.name = name;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    Pattern p;
    p.line = line_no;
    auto tab = line.find('\t');
    p.source = trim(line.substr(0, tab));
    if (tab != std::string::npos) p.category = trim(line.substr(tab + 1));
    try {
      p.compiled = std::regex(expand_placeholders(p.source),
                              std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": invalid pattern '" + p.source +
                        "': " + e.what());
    }
    ps.patterns.push_back(std::move(p));
  }
  return ps;
}

PatternSet PatternSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pattern file " + path.string());
  return parse(in, path.string());
}

bool PatternSet::matches(const std::string& raw_text) const {
  for (const auto& p : patterns)
    if (std::regex_search(raw_text, p.compiled)) return true;
  return false;
}

std::vector<std::string> sample_ids(std::vector<std::string> ids, std::size_t cap,
                                    std::uint64_t seed) {
  std::sort(ids.begin(), ids.end());
  if (ids.size() > cap) {
    // Partial Fisher-Yates over the sorted list so the draw only depends on
    // the match set and the seed.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < cap; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, ids.size() - 1);
      std::swap(ids[i], ids[pick(rng)]);
    }
    ids.resize(cap);
    std::sort(ids.begin(), ids.end());
  }
  return ids;
}

std::vector<std::string> pattern_match(const PatternSet& ps,
                                       const std::vector<ProcessedTweet>& corpus, std::size_t cap,
                                       std::uint64_t seed) {
  return match_impl(ps, corpus, cap, seed);
}

std::vector<std::string> pattern_match(const PatternSet& ps, const std::vector<Tweet>& corpus,
                                       std::size_t cap, std::uint64_t seed) {
  return match_impl(ps, corpus, cap, seed);
}

RankedList match_set_as_run(const std::string& label, const std::vector<std::string>& ids) {
  RankedList list{label, {}};
  for (const auto& id : ids) list.entries.push_back({id, 1.0});
  std::sort(list.entries.begin(), list.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) { return a.id < b.id; });
  return list;
}

RankedList lm_rank(const std::vector<ProcessedTweet>& corpus, const Query& q, const LmConfig& cfg) {
  if (!(cfg.mu > 0.0)) throw ConfigError("mu must be > 0");
  if (corpus.empty()) throw DataError("cannot rank an empty corpus");

  std::unordered_set<std::string> qset(q.terms.begin(), q.terms.end());
  std::unordered_map<std::string, double> coll_tf;
  double total = 0.0;
  for (const auto& t : corpus) {
    total += static_cast<double>(t.tokens.size());
    for (const auto& tok : t.tokens)
      if (qset.count(tok)) coll_tf[tok] += 1.0;
  }

  RankedList list{q.label, {}};
  list.entries.reserve(corpus.size());
  for (const auto& t : corpus) {
    std::unordered_map<std::string, double> tf;
    for (const auto& tok : t.tokens)
      if (qset.count(tok)) tf[tok] += 1.0;
    double len = static_cast<double>(t.tokens.size());
    double score = 0.0;
    for (const auto& w : q.terms) {
      auto c = coll_tf.find(w);
      if (c == coll_tf.end()) continue;
      double p_coll = c->second / total;
      double f = tf.count(w) ? tf[w] : 0.0;
      score += std::log((f + cfg.mu * p_coll) / (len + cfg.mu));
    }
    list.entries.push_back({t.id, score});
  }
  std::sort(list.entries.begin(), list.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.id < b.id;
            });
  return list;
}

std::vector<RocchioTerm> rocchio_scores(const std::vector<ProcessedTweet>& corpus, const Query& q,
                                        const RankedList& base, std::size_t k_top_docs) {
  std::unordered_map<std::string, const ProcessedTweet*> by_id;
  for (const auto& t : corpus) by_id.emplace(t.id, &t);

  std::unordered_set<std::string> qset(q.terms.begin(), q.terms.end());
  std::map<std::string, double> tf;
  std::size_t top = std::min(k_top_docs, base.entries.size());
  for (std::size_t i = 0; i < top; ++i) {
    auto it = by_id.find(base.entries[i].id);
    if (it == by_id.end()) continue;
    for (const auto& tok : it->second->tokens)
      if (!qset.count(tok)) tf[tok] += 1.0;
  }

  std::unordered_map<std::string, double> df;
  for (const auto& t : corpus)
    for (const auto& term : t.bag)
      if (tf.count(term)) df[term] += 1.0;

  const double n = static_cast<double>(corpus.size());
  std::vector<RocchioTerm> scored;
  for (const auto& [term, f] : tf) scored.push_back({term, f * std::log(n / df[term])});
  std::sort(scored.begin(), scored.end(), [](const RocchioTerm& a, const RocchioTerm& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });
  return scored;
}

ExpansionResult rocchio_expand(const std::vector<ProcessedTweet>& corpus, const Query& q,
                               const RankedList& base, const RocchioConfig& cfg) {
  if (cfg.k_top_docs < 1 || cfg.p_terms < 1)
    throw ConfigError("Rocchio needs k >= 1 and p >= 1");
  if (base.entries.empty()) throw DataError("Rocchio needs a nonempty base ranking");
  auto scored = rocchio_scores(corpus, q, base, cfg.k_top_docs);
  ExpansionResult result;
  result.query = q;
  for (std::size_t i = 0; i < std::min(cfg.p_terms, scored.size()); ++i) {
    result.added.push_back(scored[i].term);
    result.query.terms.push_back(scored[i].term);
  }
  if (result.added.size() < cfg.p_terms)
    result.warnings.push_back("only " + std::to_string(result.added.size()) + " of " +
                              std::to_string(cfg.p_terms) + " Rocchio terms available for '" +
                              q.label + "'");
  return result;
}

}  // namespace reliefir
