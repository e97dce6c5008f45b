#include "reliefir/vocab.h"

#include <algorithm>
#include <map>
#include <queue>
#include <tuple>

#include "reliefir/errors.h"

namespace reliefir {

namespace {

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 0;
}

void canonical_sort(std::vector<VocabEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const VocabEntry& a, const VocabEntry& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.term < b.term;
            });
}

}  // namespace

std::vector<std::string> split_utf8(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = utf8_length(static_cast<unsigned char>(s[i]));
    bool valid = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; valid && k < len; ++k)
      valid = (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    if (!valid) len = 1;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

Vocabulary Vocabulary::build(const std::vector<ProcessedTweet>& corpus,
                             std::size_t min_count) {
  if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::uint64_t> word_counts;
  for (const auto& tweet : corpus)
    for (const auto& token : tweet.tokens) ++word_counts[token];

  std::vector<VocabEntry> words;
  std::map<std::string, std::uint64_t> char_counts;
  for (const auto& [term, count] : word_counts) {
    if (count < min_count) continue;
    words.push_back({term, count});
    for (const auto& ch : split_utf8(term)) char_counts[ch] += count;
  }
  std::vector<VocabEntry> chars;
  for (const auto& [symbol, count] : char_counts) chars.push_back({symbol, count});
  return from_entries(std::move(words), std::move(chars), min_count);
}

Vocabulary Vocabulary::from_entries(std::vector<VocabEntry> words,
                                    std::vector<VocabEntry> chars,
                                    std::size_t min_count) {
  Vocabulary v;
  v.words_ = std::move(words);
  v.chars_ = std::move(chars);
  v.min_count_ = min_count;
  canonical_sort(v.words_);
  canonical_sort(v.chars_);
  v.index();
  return v;
}

void Vocabulary::index() {
  word_lookup_.clear();
  char_lookup_.clear();
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (!word_lookup_.emplace(words_[i].term, i).second)
      throw DataError("duplicate vocabulary term " + words_[i].term);
  for (std::size_t i = 0; i < chars_.size(); ++i)
    if (!char_lookup_.emplace(chars_[i].term, i).second)
      throw DataError("duplicate vocabulary character " + chars_[i].term);
}

std::optional<std::size_t> Vocabulary::word_index(std::string_view term) const {
  auto it = word_lookup_.find(std::string(term));
  if (it == word_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Vocabulary::char_index(std::string_view symbol) const {
  auto it = char_lookup_.find(std::string(symbol));
  if (it == char_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> Vocabulary::char_indices(std::string_view term) const {
  std::vector<std::size_t> out;
  for (const auto& ch : split_utf8(term))
    if (auto idx = char_index(ch)) out.push_back(*idx);
  return out;
}

std::vector<std::uint64_t> Vocabulary::word_counts() const {
  std::vector<std::uint64_t> out;
  out.reserve(words_.size());
  for (const auto& e : words_) out.push_back(e.count);
  return out;
}

std::vector<std::uint64_t> Vocabulary::char_counts() const {
  std::vector<std::uint64_t> out;
  out.reserve(chars_.size());
  for (const auto& e : chars_) out.push_back(e.count);
  return out;
}

HuffmanCode build_huffman(std::span<const std::uint64_t> counts) {
  const std::size_t n = counts.size();
  if (n < 2) throw DataError("Huffman coding needs at least 2 symbols");

  // (count, key): leaves use key = index, merged nodes key = n + creation.
  using Item = std::pair<std::uint64_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t i = 0; i < n; ++i) heap.emplace(counts[i], i);

  std::vector<std::size_t> parent(2 * n - 1, 0);
  std::vector<std::uint8_t> branch(2 * n - 1, 0);
  for (std::size_t created = 0; created < n - 1; ++created) {
    auto [c0, k0] = heap.top();
    heap.pop();
    auto [c1, k1] = heap.top();
    heap.pop();
    std::size_t node = n + created;
    parent[k0] = node;
    parent[k1] = node;
    branch[k0] = 0;
    branch[k1] = 1;
    heap.emplace(c0 + c1, node);
  }

  HuffmanCode code;
  code.node_count = n - 1;
  code.codes.resize(n);
  code.paths.resize(n);
  const std::size_t root = 2 * n - 2;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    auto& bits = code.codes[leaf];
    auto& path = code.paths[leaf];
    for (std::size_t cur = leaf; cur != root; cur = parent[cur]) {
      bits.push_back(branch[cur]);
      path.push_back(static_cast<std::uint32_t>(parent[cur] - n));
    }
    std::reverse(bits.begin(), bits.end());
    std::reverse(path.begin(), path.end());
  }
  return code;
}

HuffmanCode build_huffman(const Vocabulary& vocab) {
  auto counts = vocab.word_counts();
  return build_huffman(counts);
}

}  // namespace reliefir
