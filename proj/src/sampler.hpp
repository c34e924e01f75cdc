#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "loss.hpp"

namespace thash {

enum class LabelMode { single, multi };

// Class annotations for a dataset, positions 0..size-1 in file order, each
// carrying an external image id and a non-empty sorted label set. Immutable
// after construction.
class LabelStore {
 public:
  // mode is inferred when not forced: single iff every image has one label
  LabelStore(std::vector<uint32_t> ids,
             std::vector<std::vector<uint32_t>> label_sets,
             std::optional<LabelMode> forced_mode = std::nullopt);

  std::size_t size() const { return ids_.size(); }
  LabelMode mode() const { return mode_; }
  uint32_t id_at(std::size_t pos) const { return ids_[pos]; }
  std::span<const uint32_t> ids() const { return ids_; }
  std::span<const uint32_t> labels_at(std::size_t pos) const {
    return labels_[pos];
  }
  std::optional<std::size_t> position_of(uint32_t id) const;

  // single mode: label equality; multi mode: non-empty intersection
  bool similar(std::size_t i, std::size_t j) const;

  // first `count` positions, same ids and mode
  LabelStore head(std::size_t count) const;

 private:
  LabelMode mode_ = LabelMode::single;
  std::vector<uint32_t> ids_;
  std::vector<std::vector<uint32_t>> labels_;
  std::unordered_map<uint32_t, std::size_t> id_to_pos_;
};

// Draws (q, p, n) triplets with similar(q, p) and !similar(q, n).
// Eligibility (every q must admit both a positive and a negative) is
// precomputed so infeasibility is decided up front and every draw
// terminates. Sampling is with replacement and deterministic per seed.
class TripletSampler {
 public:
  explicit TripletSampler(const LabelStore& store);

  bool feasible() const { return !eligible_.empty(); }

  std::vector<Triplet> sample(std::size_t count, uint64_t seed) const;

 private:
  const LabelStore& store_;
  std::vector<uint32_t> eligible_;  // positions admitting both p and n

  // single-label fast path: positions grouped by class
  std::vector<uint32_t> grouped_;       // positions, class-contiguous
  std::vector<uint32_t> group_start_;   // per position: start of its group
  std::vector<uint32_t> group_size_;    // per position: size of its group
  std::vector<uint32_t> slot_;          // per position: index within grouped_

  // multi-label path
  std::unordered_map<uint32_t, std::vector<uint32_t>> label_positions_;
  std::vector<uint32_t> similar_count_;  // per position, includes self
};

std::vector<Triplet> sample_triplets(const LabelStore& store,
                                     std::size_t count, uint64_t seed);

}  // namespace thash
