#include "readorder/document.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace readorder {

bool BoundingBox::contains(double px, double py) const {
  return px > x_up && px < x_down && py > y_up && py < y_down;
}

double BoundingBox::boundary_distance(double px, double py) const {
  double dx = std::max({x_up - px, 0.0, px - x_down});
  double dy = std::max({y_up - py, 0.0, py - y_down});
  return std::hypot(dx, dy);
}

Centroid centroid(const BoundingBox& box) {
  return Centroid{(box.x_up + box.x_down) / 2.0, (box.y_up + box.y_down) / 2.0};
}

std::string to_string(SubsetTag tag) {
  switch (tag) {
    case SubsetTag::kWeak: return "weak";
    case SubsetTag::kStructured: return "structured";
    case SubsetTag::kInfograph: return "infograph";
    case SubsetTag::kOther: return "other";
  }
  return "other";
}

SubsetTag subset_tag_from_string(const std::string& name) {
  if (name == "weak") return SubsetTag::kWeak;
  if (name == "structured") return SubsetTag::kStructured;
  if (name == "infograph") return SubsetTag::kInfograph;
  if (name == "other") return SubsetTag::kOther;
  throw std::invalid_argument("unknown subset tag: " + name);
}

int Document::box_index(const std::string& id) const {
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

const BoundingBox* Document::find_box(const std::string& id) const {
  int i = box_index(id);
  return i < 0 ? nullptr : &boxes[i];
}

double Document::median_box_height() const {
  if (boxes.empty()) return 0.0;
  std::vector<double> heights;
  heights.reserve(boxes.size());
  for (const auto& box : boxes) heights.push_back(box.height());
  std::sort(heights.begin(), heights.end());
  std::size_t n = heights.size();
  if (n % 2 == 1) return heights[n / 2];
  return (heights[n / 2 - 1] + heights[n / 2]) / 2.0;
}

std::vector<Violation> validate_document(const Document& doc) {
  std::vector<Violation> out;
  if (!(doc.page_width >= 0.0) || !(doc.page_height >= 0.0) ||
      !std::isfinite(doc.page_width) || !std::isfinite(doc.page_height)) {
    out.push_back({"", "page dimensions must be finite and >= 0"});
  }
  std::unordered_set<std::string> seen;
  for (const auto& box : doc.boxes) {
    const double coords[] = {box.x_up, box.y_up, box.x_down, box.y_down};
    bool finite = true;
    for (double c : coords) {
      if (!std::isfinite(c)) finite = false;
    }
    if (!finite) {
      out.push_back({box.id, "coordinates must be finite"});
      continue;
    }
    if (box.x_up < 0.0 || box.y_up < 0.0) {
      out.push_back({box.id, "coordinates must be >= 0"});
    }
    if (box.x_down < box.x_up) {
      out.push_back({box.id, "x_down < x_up"});
    }
    if (box.y_down < box.y_up) {
      out.push_back({box.id, "y_down < y_up"});
    }
    if (box.x_down > doc.page_width || box.y_down > doc.page_height) {
      out.push_back({box.id, "box extends beyond the page"});
    }
    if (!seen.insert(box.id).second) {
      out.push_back({box.id, "duplicate box id"});
    }
  }
  return out;
}

}  // namespace readorder
