#include "reliefir/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "reliefir/errors.h"

namespace reliefir {

namespace {

using json = nlohmann::json;

bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i])
      return false;
  return true;
}

bool is_url(std::string_view token) {
  return starts_with_ci(token, "http") || starts_with_ci(token, "www");
}

std::string_view strip_punct(std::string_view s) {
  while (!s.empty() && is_ascii_punct(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ascii_punct(s.back())) s.remove_suffix(1);
  return s;
}

class IdRegistry {
 public:
  void add(const std::string& id, std::size_t line) {
    if (id.empty())
      throw DataError("line " + std::to_string(line) + ": empty id");
    if (!seen_.insert(id).second) throw DataError("duplicate id " + id);
  }

 private:
  std::unordered_set<std::string> seen_;
};

}  // namespace

std::vector<Tweet> ingest_jsonl(std::istream& in) {
  std::vector<Tweet> out;
  IdRegistry ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object())
      throw DataError("line " + std::to_string(line_no) + ": not a JSON object");
    auto id = obj.find("id");
    auto text = obj.find("text");
    if (id == obj.end() || text == obj.end() || !text->is_string())
      throw DataError("line " + std::to_string(line_no) +
                      ": expected string fields \"id\" and \"text\"");
    std::string id_str;
    if (id->is_string())
      id_str = id->get<std::string>();
    else if (id->is_number_integer())
      id_str = std::to_string(id->get<long long>());
    else
      throw DataError("line " + std::to_string(line_no) + ": bad \"id\" field");
    ids.add(id_str, line_no);
    out.push_back({std::move(id_str), text->get<std::string>(), out.size()});
  }
  return out;
}

std::vector<Tweet> ingest_tsv(std::istream& in) {
  std::vector<Tweet> out;
  IdRegistry ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError("line " + std::to_string(line_no) +
                      ": expected id<TAB>text");
    std::string id = line.substr(0, tab);
    ids.add(id, line_no);
    out.push_back({std::move(id), line.substr(tab + 1), out.size()});
  }
  return out;
}

std::vector<Tweet> ingest(const std::filesystem::path& path,
                          InputFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return format == InputFormat::kJsonl ? ingest_jsonl(in) : ingest_tsv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

InputFormat parse_input_format(std::string_view name) {
  if (name == "jsonl") return InputFormat::kJsonl;
  if (name == "tsv") return InputFormat::kTsv;
  throw ConfigError("unknown input format: " + std::string(name));
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file " + path.string());
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t\r");
    words.insert(line.substr(first, last - first + 1));
  }
  return words;
}

std::filesystem::path default_stopwords_path() {
  return std::filesystem::path(RELIEFIR_DATA_DIR) / "stopwords.txt";
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (start == i) break;
    std::string_view raw = text.substr(start, i - start);
    std::string_view lead = raw;
    while (!lead.empty() && is_ascii_punct(lead.front()) && lead.front() != '@')
      lead.remove_prefix(1);
    if (!lead.empty() && lead.front() == '@') continue;
    if (is_url(lead)) continue;
    std::string_view word = strip_punct(raw);
    if (word.empty()) continue;
    std::string lowered(word);
    for (char& c : lowered)
      if (static_cast<unsigned char>(c) < 0x80)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(std::move(lowered));
  }
  return out;
}

ProcessedTweet preprocess(const Tweet& tweet, const StopwordSet& stopwords,
                          const Stemmer& stemmer) {
  ProcessedTweet out;
  out.id = tweet.id;
  out.text = tweet.text;
  for (auto& token : tokenize(tweet.text)) {
    if (stopwords.count(token)) continue;
    std::string stem = stemmer ? stemmer(token) : token;
    if (stem.empty()) continue;
    out.tokens.push_back(std::move(stem));
  }
  out.bag.insert(out.tokens.begin(), out.tokens.end());
  return out;
}

std::vector<ProcessedTweet> preprocess_all(const std::vector<Tweet>& tweets,
                                           const StopwordSet& stopwords,
                                           const Stemmer& stemmer) {
  std::vector<ProcessedTweet> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) out.push_back(preprocess(t, stopwords, stemmer));
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(inter) /
         static_cast<double>(a.size() + b.size() - inter);
}

std::vector<ProcessedTweet> dedup(const std::vector<ProcessedTweet>& corpus,
                                  const DedupConfig& cfg) {
  const double threshold = cfg.jaccard_threshold;
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw ConfigError("jaccard threshold must lie in [0,1]");

  std::vector<ProcessedTweet> kept;
  // Retained tweets sharing no term have similarity 0 (or 1 when both bags
  // are empty), so only tweets reachable through the postings need an exact
  // comparison.
  std::unordered_map<std::string, std::vector<std::size_t>> postings;
  bool kept_empty_bag = false;
  std::unordered_map<std::size_t, std::size_t> overlap;

  for (const auto& tweet : corpus) {
    bool duplicate = false;
    if (tweet.bag.empty()) {
      duplicate = kept_empty_bag || (threshold == 0.0 && !kept.empty());
    } else if (threshold == 0.0 && !kept.empty()) {
      duplicate = true;
    } else {
      overlap.clear();
      for (const auto& term : tweet.bag) {
        auto it = postings.find(term);
        if (it == postings.end()) continue;
        for (std::size_t idx : it->second) ++overlap[idx];
      }
      for (const auto& [idx, inter] : overlap) {
        std::size_t uni = tweet.bag.size() + kept[idx].bag.size() - inter;
        if (static_cast<double>(inter) / static_cast<double>(uni) >= threshold) {
          duplicate = true;
          break;
        }
      }
    }
    if (duplicate) continue;
    std::size_t idx = kept.size();
    for (const auto& term : tweet.bag) postings[term].push_back(idx);
    if (tweet.bag.empty()) kept_empty_bag = true;
    kept.push_back(tweet);
  }
  return kept;
}

void write_processed(const std::filesystem::path& path,
                     const std::vector<ProcessedTweet>& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& t : corpus) {
    json obj = {{"id", t.id}, {"text", t.text}, {"tokens", t.tokens}};
    out << obj.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<ProcessedTweet> read_processed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<ProcessedTweet> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    auto where = path.string() + ":" + std::to_string(line_no);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("id") ||
        !obj.contains("tokens") || !obj["tokens"].is_array())
      throw DataError(where + ": not a processed-corpus record");
    ProcessedTweet t;
    t.id = obj["id"].get<std::string>();
    if (!seen.insert(t.id).second) throw DataError("duplicate id " + t.id);
    if (obj.contains("text")) t.text = obj["text"].get<std::string>();
    for (const auto& tok : obj["tokens"]) t.tokens.push_back(tok.get<std::string>());
    t.bag.insert(t.tokens.begin(), t.tokens.end());
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace reliefir
