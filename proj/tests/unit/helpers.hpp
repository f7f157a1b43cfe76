#pragma once

#include <string>
#include <vector>

#include "readorder/document.hpp"
#include "readorder/sequence.hpp"

namespace testutil {

inline readorder::BoundingBox box(std::string id, double x_up, double y_up, double x_down,
                                  double y_down, std::string text = "") {
  readorder::BoundingBox b;
  b.id = std::move(id);
  b.x_up = x_up;
  b.y_up = y_up;
  b.x_down = x_down;
  b.y_down = y_down;
  b.text = std::move(text);
  return b;
}

inline readorder::Document doc(std::vector<readorder::BoundingBox> boxes, double width = 1000,
                               double height = 800, std::string id = "doc") {
  readorder::Document d;
  d.doc_id = std::move(id);
  d.page_width = width;
  d.page_height = height;
  d.boxes = std::move(boxes);
  return d;
}

// All permutations of {0..n-1}.
inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> base(n);
  for (int i = 0; i < n; ++i) base[i] = i;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

inline std::vector<std::string> ids_of(const readorder::Document& d) {
  std::vector<std::string> out;
  for (const auto& b : d.boxes) out.push_back(b.id);
  return out;
}

}  // namespace testutil
