#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "bitcode.hpp"

namespace thash {

struct SearchHit {
  uint32_t id = 0;
  uint32_t distance = 0;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

// Immutable code database for exhaustive Hamming scans. Codes are stored as
// one flat word array so a scan is a straight XOR+popcount pass.
class CodeDatabase {
 public:
  CodeDatabase(std::span<const BitCode> codes, std::vector<uint32_t> ids);

  std::size_t size() const { return ids_.size(); }
  uint32_t bits() const { return bits_; }
  std::size_t words_per_code() const { return words_per_code_; }
  uint32_t id_at(std::size_t pos) const { return ids_[pos]; }
  std::span<const uint32_t> ids() const { return ids_; }
  bool contains(uint32_t id) const { return id_set_.contains(id); }
  BitCode code_at(std::size_t pos) const;

  std::span<const uint64_t> code_words(std::size_t pos) const {
    return {words_.data() + pos * words_per_code_, words_per_code_};
  }

 private:
  uint32_t bits_ = 0;
  std::size_t words_per_code_ = 0;
  std::vector<uint64_t> words_;
  std::vector<uint32_t> ids_;
  std::unordered_set<uint32_t> id_set_;
};

// The min(k, N) nearest entries by Hamming distance, ascending; ties broken
// by ascending insertion position.
std::vector<SearchHit> search(const CodeDatabase& db, const BitCode& query,
                              std::size_t k);

// Elementwise search; queries are independent. With threads > 1 the queries
// are scanned concurrently; output is identical to the sequential run.
std::vector<std::vector<SearchHit>> batch_search(
    const CodeDatabase& db, std::span<const BitCode> queries, std::size_t k,
    unsigned threads = 1);

}  // namespace thash
