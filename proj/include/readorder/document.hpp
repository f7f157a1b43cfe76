#pragma once

#include <optional>
#include <string>
#include <vector>

namespace readorder {

// Page coordinate convention used throughout: origin at the top-left corner,
// x grows rightward, y grows downward, units are pixels.

struct Centroid {
  double x = 0.0;
  double y = 0.0;
};

// An OCR-detected rectangle with the text it contains. (x_up, y_up) is the
// top-left corner, (x_down, y_down) the bottom-right one.
struct BoundingBox {
  std::string id;
  double x_up = 0.0;
  double y_up = 0.0;
  double x_down = 0.0;
  double y_down = 0.0;
  std::string text;

  double width() const { return x_down - x_up; }
  double height() const { return y_down - y_up; }
  double area() const { return width() * height(); }

  // Strict interior test; boundary points are handled by the periphery rule.
  bool contains(double px, double py) const;

  // Euclidean distance from (px, py) to the rectangle; 0 inside or on the edge.
  double boundary_distance(double px, double py) const;
};

Centroid centroid(const BoundingBox& box);

enum class SubsetTag { kWeak, kStructured, kInfograph, kOther };

std::string to_string(SubsetTag tag);
SubsetTag subset_tag_from_string(const std::string& name);

struct QaPair {
  std::string question;
  std::vector<std::string> answers;
};

struct Document {
  std::string doc_id;
  double page_width = 0.0;
  double page_height = 0.0;
  SubsetTag subset_tag = SubsetTag::kOther;
  std::vector<BoundingBox> boxes;  // OCR emission order; index 0 = emitted first
  std::vector<QaPair> qa;
  std::optional<std::string> image_path;

  // Index into boxes, or -1 when the id is unknown.
  int box_index(const std::string& id) const;
  const BoundingBox* find_box(const std::string& id) const;

  // Median of box heights; 0 for an empty document. Default geometric scale
  // for gaze alignment and line grouping.
  double median_box_height() const;
};

struct Violation {
  std::string box_id;  // empty for document-level rules
  std::string rule;
};

// Empty result iff every type invariant holds. Violations are plain data.
std::vector<Violation> validate_document(const Document& doc);

}  // namespace readorder
