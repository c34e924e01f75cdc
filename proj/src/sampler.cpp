#include "sampler.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "error.hpp"
#include "rng.hpp"

namespace thash {

LabelStore::LabelStore(std::vector<uint32_t> ids,
                       std::vector<std::vector<uint32_t>> label_sets,
                       std::optional<LabelMode> forced_mode) {
  if (ids.size() != label_sets.size()) {
    throw_error(ErrorKind::invalid_argument,
                "ids and label sets differ in length");
  }
  if (ids.empty()) {
    throw_error(ErrorKind::data, "label store is empty");
  }
  bool all_single = true;
  for (std::size_t i = 0; i < label_sets.size(); ++i) {
    auto& set = label_sets[i];
    if (set.empty()) {
      throw_error(ErrorKind::data,
                  "image " + std::to_string(ids[i]) + " has no labels");
    }
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    if (set.size() > 1) all_single = false;
  }
  mode_ = forced_mode.value_or(all_single ? LabelMode::single
                                          : LabelMode::multi);
  if (mode_ == LabelMode::single && !all_single) {
    throw_error(ErrorKind::data,
                "single-label mode forced but some image has several labels");
  }
  id_to_pos_.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!id_to_pos_.emplace(ids[i], i).second) {
      throw_error(ErrorKind::data,
                  "duplicate image id " + std::to_string(ids[i]));
    }
  }
  ids_ = std::move(ids);
  labels_ = std::move(label_sets);
}

std::optional<std::size_t> LabelStore::position_of(uint32_t id) const {
  const auto it = id_to_pos_.find(id);
  if (it == id_to_pos_.end()) return std::nullopt;
  return it->second;
}

bool LabelStore::similar(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) {
    throw_error(ErrorKind::invalid_argument, "similar: index out of range");
  }
  const auto& a = labels_[i];
  const auto& b = labels_[j];
  if (mode_ == LabelMode::single) {
    return a[0] == b[0];
  }
  std::size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x] == b[y]) return true;
    if (a[x] < b[y]) {
      ++x;
    } else {
      ++y;
    }
  }
  return false;
}

LabelStore LabelStore::head(std::size_t count) const {
  if (count < 1 || count > size()) {
    throw_error(ErrorKind::invalid_argument,
                "head: count " + std::to_string(count) + " outside [1, " +
                    std::to_string(size()) + "]");
  }
  std::vector<uint32_t> ids(ids_.begin(), ids_.begin() + count);
  std::vector<std::vector<uint32_t>> labels(labels_.begin(),
                                            labels_.begin() + count);
  return LabelStore(std::move(ids), std::move(labels), mode_);
}

TripletSampler::TripletSampler(const LabelStore& store) : store_(store) {
  const std::size_t n = store.size();

  for (std::size_t i = 0; i < n; ++i) {
    for (uint32_t label : store.labels_at(i)) {
      label_positions_[label].push_back(static_cast<uint32_t>(i));
    }
  }

  if (store.mode() == LabelMode::single) {
    // class-contiguous layout; complements are two contiguous runs
    grouped_.reserve(n);
    group_start_.resize(n);
    group_size_.resize(n);
    slot_.resize(n);
    std::map<uint32_t, std::vector<uint32_t>> ordered(
        label_positions_.begin(), label_positions_.end());
    for (const auto& [label, positions] : ordered) {
      const uint32_t start = static_cast<uint32_t>(grouped_.size());
      for (uint32_t pos : positions) {
        slot_[pos] = static_cast<uint32_t>(grouped_.size());
        grouped_.push_back(pos);
        group_start_[pos] = start;
        group_size_[pos] = static_cast<uint32_t>(positions.size());
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (group_size_[i] >= 2 && group_size_[i] < n) {
        eligible_.push_back(static_cast<uint32_t>(i));
      }
    }
    return;
  }

  // multi mode: count, per image, how many images share at least one label
  similar_count_.assign(n, 0);
  std::vector<uint32_t> stamp(n, UINT32_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    uint32_t count = 0;
    for (uint32_t label : store.labels_at(i)) {
      for (uint32_t pos : label_positions_[label]) {
        if (stamp[pos] != i) {
          stamp[pos] = static_cast<uint32_t>(i);
          ++count;
        }
      }
    }
    similar_count_[i] = count;  // includes i itself
    if (count >= 2 && count < n) {
      eligible_.push_back(static_cast<uint32_t>(i));
    }
  }
}

std::vector<Triplet> TripletSampler::sample(std::size_t count,
                                            uint64_t seed) const {
  if (count < 1) {
    throw_error(ErrorKind::invalid_argument, "sample: count must be >= 1");
  }
  if (eligible_.empty()) {
    throw_error(ErrorKind::infeasible_sampling,
                "no image admits both a positive and a negative");
  }
  const std::size_t n = store_.size();
  Rng rng(seed);
  std::vector<Triplet> out;
  out.reserve(count);

  if (store_.mode() == LabelMode::single) {
    for (std::size_t m = 0; m < count; ++m) {
      const uint32_t q = eligible_[rng.below(eligible_.size())];
      const uint32_t start = group_start_[q];
      const uint32_t size = group_size_[q];
      // positive: uniform over the class, skipping q's slot
      uint32_t r = static_cast<uint32_t>(rng.below(size - 1));
      const uint32_t qslot = slot_[q] - start;
      const uint32_t p = grouped_[start + (r >= qslot ? r + 1 : r)];
      // negative: uniform over the complement of the class
      uint32_t c = static_cast<uint32_t>(rng.below(n - size));
      const uint32_t neg = grouped_[c < start ? c : c + size];
      out.push_back({q, p, neg});
    }
    return out;
  }

  std::vector<uint32_t> stamp(n, UINT32_MAX);
  std::vector<uint32_t> positives;
  for (std::size_t m = 0; m < count; ++m) {
    const uint32_t q = eligible_[rng.below(eligible_.size())];
    positives.clear();
    stamp[q] = static_cast<uint32_t>(m);
    for (uint32_t label : store_.labels_at(q)) {
      for (uint32_t pos : label_positions_.at(label)) {
        if (stamp[pos] != m) {
          stamp[pos] = static_cast<uint32_t>(m);
          positives.push_back(pos);
        }
      }
    }
    const uint32_t p = positives[rng.below(positives.size())];
    // negative: the t-th position not marked as similar to q
    uint32_t t = static_cast<uint32_t>(rng.below(n - similar_count_[q]));
    uint32_t neg = 0;
    for (uint32_t pos = 0; pos < n; ++pos) {
      if (stamp[pos] == m) continue;
      if (t == 0) {
        neg = pos;
        break;
      }
      --t;
    }
    out.push_back({q, p, neg});
  }
  return out;
}

std::vector<Triplet> sample_triplets(const LabelStore& store,
                                     std::size_t count, uint64_t seed) {
  return TripletSampler(store).sample(count, seed);
}

}  // namespace thash
