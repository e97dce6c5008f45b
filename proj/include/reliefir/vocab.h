#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reliefir/corpus.h"

namespace reliefir {

// Splits a UTF-8 string into code points, each returned as its own byte
// string. Bytes that do not start a valid sequence become single-byte
// symbols, so the split never fails.
std::vector<std::string> split_utf8(std::string_view s);

struct VocabEntry {
  std::string term;
  std::uint64_t count = 0;

  bool operator==(const VocabEntry&) const = default;
};

// Word and character inventories. Indices are dense and ordered by
// descending count, ties by ascending term (byte order).
class Vocabulary {
 public:
  Vocabulary() = default;

  // Words with corpus frequency below `min_count` are dropped; characters
  // are collected from retained words only. Throws DataError on an empty
  // corpus.
  static Vocabulary build(const std::vector<ProcessedTweet>& corpus,
                          std::size_t min_count);

  // Rebuilds lookups from explicit inventories (used by persistence and
  // warm start). Entries are re-sorted into canonical order.
  static Vocabulary from_entries(std::vector<VocabEntry> words,
                                 std::vector<VocabEntry> chars,
                                 std::size_t min_count);

  std::size_t size() const { return words_.size(); }
  std::size_t char_size() const { return chars_.size(); }
  std::size_t min_count() const { return min_count_; }

  const std::vector<VocabEntry>& words() const { return words_; }
  const std::vector<VocabEntry>& chars() const { return chars_; }

  std::optional<std::size_t> word_index(std::string_view term) const;
  std::optional<std::size_t> char_index(std::string_view symbol) const;

  // Char indices for each code point of `term` that is in the inventory.
  std::vector<std::size_t> char_indices(std::string_view term) const;

  std::vector<std::uint64_t> word_counts() const;
  std::vector<std::uint64_t> char_counts() const;

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && chars_ == other.chars_ &&
           min_count_ == other.min_count_;
  }

 private:
  void index();

  std::vector<VocabEntry> words_;
  std::vector<VocabEntry> chars_;
  std::size_t min_count_ = 1;
  std::unordered_map<std::string, std::size_t> word_lookup_;
  std::unordered_map<std::string, std::size_t> char_lookup_;
};

// Binary Huffman coding over leaf counts. Internal nodes are numbered in
// creation order, so the root is node_count - 1. Each path lists internal
// nodes from the root down; code[i] is the branch taken below path[i].
struct HuffmanCode {
  std::vector<std::vector<std::uint8_t>> codes;
  std::vector<std::vector<std::uint32_t>> paths;
  std::size_t node_count = 0;

  std::size_t leaves() const { return codes.size(); }
};

// Equal counts are merged lower-index first; a merged node sorts after
// every leaf and after older merged nodes of the same count. The first node
// taken in a merge receives bit 0. Throws DataError for fewer than 2 leaves.
HuffmanCode build_huffman(std::span<const std::uint64_t> counts);
HuffmanCode build_huffman(const Vocabulary& vocab);

}  // namespace reliefir
