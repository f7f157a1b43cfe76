#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace readorder {

// Ordinal assignment over a document's boxes. Non-missing ordinals always
// form a permutation of 0..k-1; a box with no position carries kMissing.
class ReadingSequence {
 public:
  static constexpr int kMissing = -1;

  ReadingSequence() = default;

  // ids_in_order receive ordinals 0..k-1.
  static ReadingSequence from_permutation(const std::vector<std::string>& ids_in_order);
  // Same, plus every id in `universe` not ordered gets kMissing.
  static ReadingSequence from_permutation(const std::vector<std::string>& ids_in_order,
                                          const std::vector<std::string>& universe);

  void set(const std::string& box_id, int ordinal);
  bool contains(const std::string& box_id) const;
  // nullopt when the id has no entry at all; kMissing is a present value.
  std::optional<int> ordinal(const std::string& box_id) const;

  std::size_t size() const { return order_.size(); }
  std::size_t ordered_count() const;
  std::size_t missing_count() const;
  bool empty() const { return order_.empty(); }

  // Empty iff non-missing ordinals are exactly 0..k-1, each used once.
  std::vector<std::string> invariant_violations() const;

  // Box ids in ordinal order, missing entries excluded. Throws
  // std::invalid_argument when the permutation invariant is violated.
  std::vector<std::string> as_permutation() const;

  const std::map<std::string, int>& entries() const { return order_; }

  bool operator==(const ReadingSequence& other) const { return order_ == other.order_; }

 private:
  std::map<std::string, int> order_;
};

}  // namespace readorder
