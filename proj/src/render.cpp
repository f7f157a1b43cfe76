#include "readorder/render.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <vector>

namespace readorder {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Document& doc, const ReadingSequence& seq,
                       const RenderStyle& style) {
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << num(doc.page_width) << "\" height=\"" << num(doc.page_height) << "\" viewBox=\"0 0 "
      << num(doc.page_width) << " " << num(doc.page_height) << "\">\n";
  svg << "  <defs>\n"
      << "    <marker id=\"arrowhead\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" "
         "refY=\"3\" orient=\"auto\">\n"
      << "      <path d=\"M0,0 L6,3 L0,6 z\" fill=\"" << style.arrow_color << "\"/>\n"
      << "    </marker>\n"
      << "  </defs>\n";
  svg << "  <rect class=\"page\" x=\"0\" y=\"0\" width=\"" << num(doc.page_width)
      << "\" height=\"" << num(doc.page_height) << "\" fill=\"white\" stroke=\"#cccccc\"/>\n";

  // Boxes: ordered ones solid, missing ones dashed and unlabeled.
  for (const auto& box : doc.boxes) {
    auto ord = seq.ordinal(box.id);
    bool missing = !ord || *ord < 0;
    svg << "  <rect class=\"box" << (missing ? " missing" : "") << "\" x=\"" << num(box.x_up)
        << "\" y=\"" << num(box.y_up) << "\" width=\"" << num(box.width()) << "\" height=\""
        << num(box.height()) << "\" fill=\"none\" stroke=\""
        << (missing ? style.missing_color : style.box_color) << "\" stroke-width=\""
        << num(style.stroke_width) << "\"";
    if (missing) svg << " stroke-dasharray=\"6 4\"";
    svg << "/>\n";
  }

  // Centroids in ordinal order.
  std::vector<std::pair<int, const BoundingBox*>> ordered;
  for (const auto& box : doc.boxes) {
    auto ord = seq.ordinal(box.id);
    if (ord && *ord >= 0) ordered.emplace_back(*ord, &box);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  if (style.arrows) {
    for (std::size_t i = 1; i < ordered.size(); ++i) {
      Centroid a = centroid(*ordered[i - 1].second);
      Centroid b = centroid(*ordered[i].second);
      svg << "  <line class=\"arrow\" x1=\"" << num(a.x) << "\" y1=\"" << num(a.y)
          << "\" x2=\"" << num(b.x) << "\" y2=\"" << num(b.y) << "\" stroke=\""
          << style.arrow_color << "\" stroke-width=\"" << num(style.stroke_width)
          << "\" marker-end=\"url(#arrowhead)\"/>\n";
    }
  }

  // Ordinal labels are 1-based for figures.
  for (const auto& [ord, box] : ordered) {
    Centroid c = centroid(*box);
    svg << "  <text class=\"ordinal\" x=\"" << num(c.x) << "\" y=\"" << num(c.y)
        << "\" fill=\"" << style.label_color << "\" font-size=\"" << num(style.font_size)
        << "\" text-anchor=\"middle\" dominant-baseline=\"middle\">" << (ord + 1)
        << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace readorder
