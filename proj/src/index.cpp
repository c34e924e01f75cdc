#include "index.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <thread>

#include "error.hpp"

namespace thash {

namespace {

// (distance, insertion position); the selection order everywhere
struct Candidate {
  uint32_t distance;
  uint32_t pos;

  bool operator<(const Candidate& other) const {
    return distance != other.distance ? distance < other.distance
                                      : pos < other.pos;
  }
};

uint32_t scan_distance(std::span<const uint64_t> a,
                       std::span<const uint64_t> b) {
  uint32_t dist = 0;
  for (std::size_t w = 0; w < a.size(); ++w) {
    dist += static_cast<uint32_t>(std::popcount(a[w] ^ b[w]));
  }
  return dist;
}

std::vector<SearchHit> to_hits(const CodeDatabase& db,
                               std::vector<Candidate> selected) {
  std::sort(selected.begin(), selected.end());
  std::vector<SearchHit> hits(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i) {
    hits[i] = {db.id_at(selected[i].pos), selected[i].distance};
  }
  return hits;
}

}  // namespace

CodeDatabase::CodeDatabase(std::span<const BitCode> codes,
                           std::vector<uint32_t> ids) {
  if (codes.empty()) {
    throw_error(ErrorKind::invalid_argument, "code database is empty");
  }
  if (codes.size() != ids.size()) {
    throw_error(ErrorKind::invalid_argument,
                "codes and ids differ in length");
  }
  bits_ = codes.front().length();
  words_per_code_ = words_for_bits(bits_);
  words_.reserve(codes.size() * words_per_code_);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i].length() != bits_) {
      throw_error(ErrorKind::dimension_mismatch,
                  "code " + std::to_string(i) + " has length " +
                      std::to_string(codes[i].length()) + ", expected " +
                      std::to_string(bits_));
    }
    const auto w = codes[i].words();
    words_.insert(words_.end(), w.begin(), w.end());
  }
  id_set_.reserve(ids.size());
  for (uint32_t id : ids) {
    if (!id_set_.insert(id).second) {
      throw_error(ErrorKind::data, "duplicate id " + std::to_string(id));
    }
  }
  ids_ = std::move(ids);
}

BitCode CodeDatabase::code_at(std::size_t pos) const {
  const auto w = code_words(pos);
  return BitCode(bits_, std::vector<uint64_t>(w.begin(), w.end()));
}

std::vector<SearchHit> search(const CodeDatabase& db, const BitCode& query,
                              std::size_t k) {
  if (query.length() != db.bits()) {
    throw_error(ErrorKind::dimension_mismatch,
                "query length " + std::to_string(query.length()) +
                    " does not match database codes (" +
                    std::to_string(db.bits()) + " bits)");
  }
  if (k < 1) {
    throw_error(ErrorKind::invalid_argument, "k must be >= 1");
  }
  const std::size_t n = db.size();
  const auto qw = query.words();
  k = std::min(k, n);

  if (k >= n / 4) {
    // close to a full ranking: sort everything
    std::vector<Candidate> all(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
      all[pos] = {scan_distance(qw, db.code_words(pos)),
                  static_cast<uint32_t>(pos)};
    }
    std::sort(all.begin(), all.end());
    all.resize(k);
    std::vector<SearchHit> hits(k);
    for (std::size_t i = 0; i < k; ++i) {
      hits[i] = {db.id_at(all[i].pos), all[i].distance};
    }
    return hits;
  }

  // bounded max-heap of the k best candidates, O(N log k)
  std::vector<Candidate> heap;
  heap.reserve(k);
  const auto worse = [](const Candidate& a, const Candidate& b) {
    return a < b;  // max-heap on (distance, pos)
  };
  for (std::size_t pos = 0; pos < n; ++pos) {
    const Candidate c{scan_distance(qw, db.code_words(pos)),
                      static_cast<uint32_t>(pos)};
    if (heap.size() < k) {
      heap.push_back(c);
      std::push_heap(heap.begin(), heap.end(), worse);
    } else if (c < heap.front()) {
      std::pop_heap(heap.begin(), heap.end(), worse);
      heap.back() = c;
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  }
  return to_hits(db, std::move(heap));
}

std::vector<std::vector<SearchHit>> batch_search(
    const CodeDatabase& db, std::span<const BitCode> queries, std::size_t k,
    unsigned threads) {
  std::vector<std::vector<SearchHit>> results(queries.size());
  if (threads <= 1 || queries.size() <= 1) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      results[i] = search(db, queries[i], k);
    }
    return results;
  }
  const unsigned workers =
      std::min<std::size_t>(threads, queries.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < queries.size(); i += workers) {
          results[i] = search(db, queries[i], k);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace thash
