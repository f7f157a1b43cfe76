#include "readorder/sequence.hpp"

#include <stdexcept>

namespace readorder {

ReadingSequence ReadingSequence::from_permutation(const std::vector<std::string>& ids_in_order) {
  ReadingSequence seq;
  for (std::size_t i = 0; i < ids_in_order.size(); ++i) {
    seq.set(ids_in_order[i], static_cast<int>(i));
  }
  return seq;
}

ReadingSequence ReadingSequence::from_permutation(const std::vector<std::string>& ids_in_order,
                                                  const std::vector<std::string>& universe) {
  ReadingSequence seq;
  for (const auto& id : universe) seq.set(id, kMissing);
  for (std::size_t i = 0; i < ids_in_order.size(); ++i) {
    seq.set(ids_in_order[i], static_cast<int>(i));
  }
  return seq;
}

void ReadingSequence::set(const std::string& box_id, int ordinal) {
  order_[box_id] = ordinal;
}

bool ReadingSequence::contains(const std::string& box_id) const {
  return order_.count(box_id) > 0;
}

std::optional<int> ReadingSequence::ordinal(const std::string& box_id) const {
  auto it = order_.find(box_id);
  if (it == order_.end()) return std::nullopt;
  return it->second;
}

std::size_t ReadingSequence::ordered_count() const {
  std::size_t n = 0;
  for (const auto& [id, ord] : order_) {
    if (ord >= 0) ++n;
  }
  return n;
}

std::size_t ReadingSequence::missing_count() const {
  return order_.size() - ordered_count();
}

std::vector<std::string> ReadingSequence::invariant_violations() const {
  std::vector<std::string> out;
  std::size_t k = ordered_count();
  std::vector<int> used(k, 0);
  for (const auto& [id, ord] : order_) {
    if (ord == kMissing) continue;
    if (ord < 0 || static_cast<std::size_t>(ord) >= k) {
      out.push_back("ordinal " + std::to_string(ord) + " for box '" + id +
                    "' outside the contiguous range 0.." + std::to_string(k == 0 ? 0 : k - 1));
      continue;
    }
    if (used[ord]++) {
      out.push_back("ordinal " + std::to_string(ord) + " used more than once (box '" + id + "')");
    }
  }
  return out;
}

std::vector<std::string> ReadingSequence::as_permutation() const {
  auto violations = invariant_violations();
  if (!violations.empty()) {
    throw std::invalid_argument("invalid reading sequence: " + violations.front());
  }
  std::vector<std::string> result(ordered_count());
  for (const auto& [id, ord] : order_) {
    if (ord >= 0) result[ord] = id;
  }
  return result;
}

}  // namespace readorder
