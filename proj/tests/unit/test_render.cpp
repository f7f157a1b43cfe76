#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "readorder/render.hpp"
#include "readorder/synth.hpp"

using namespace readorder;
using testutil::box;

namespace {

int count_occurrences(const std::string& haystack, const std::string& needle) {
  int count = 0;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace

TEST_CASE("render_svg: full 3-box permutation has 3 rects, 3 labels, 2 arrows") {
  Document d = testutil::doc(
      {box("a", 0, 0, 100, 50), box("b", 200, 0, 300, 50), box("c", 400, 0, 500, 50)});
  ReadingSequence seq;
  seq.set("a", 0);
  seq.set("b", 1);
  seq.set("c", 2);
  std::string svg = render_svg(d, seq);
  CHECK(count_occurrences(svg, "<rect class=\"box") == 3);
  CHECK(count_occurrences(svg, "<text class=\"ordinal\"") == 3);
  CHECK(count_occurrences(svg, "<line class=\"arrow\"") == 2);
  CHECK(count_occurrences(svg, "<rect class=\"page\"") == 1);
  // labels are 1-based
  CHECK(svg.find(">1</text>") != std::string::npos);
  CHECK(svg.find(">3</text>") != std::string::npos);
  CHECK(svg.find(">0</text>") == std::string::npos);
}

TEST_CASE("render_svg: missing boxes are dashed and unlabeled") {
  Document d = testutil::doc(
      {box("a", 0, 0, 100, 50), box("b", 200, 0, 300, 50), box("c", 400, 0, 500, 50)});
  ReadingSequence seq;
  seq.set("a", 0);
  seq.set("b", ReadingSequence::kMissing);
  seq.set("c", 1);
  std::string svg = render_svg(d, seq);
  CHECK(count_occurrences(svg, "stroke-dasharray") == 1);
  CHECK(count_occurrences(svg, "<text class=\"ordinal\"") == 2);
  CHECK(count_occurrences(svg, "<line class=\"arrow\"") == 1);
}

TEST_CASE("render_svg: empty document is still valid SVG with a page frame") {
  Document d;
  d.page_width = 200;
  d.page_height = 100;
  std::string svg = render_svg(d, ReadingSequence{});
  CHECK(svg.find("<?xml") == 0);
  CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"") !=
        std::string::npos);
  CHECK(count_occurrences(svg, "<rect class=\"page\"") == 1);
  CHECK(count_occurrences(svg, "<rect class=\"box") == 0);
  CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
}

TEST_CASE("render_svg primitive count is 3n-1 for full permutations") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthSpec spec;
    spec.rows = 2 + static_cast<int>(seed % 3);
    spec.cols = 3;
    spec.seed = seed;
    auto sample = synth(spec);
    int n = static_cast<int>(sample.doc.boxes.size());
    std::string svg = render_svg(sample.doc, sample.gold);
    int primitives = count_occurrences(svg, "<rect class=\"box") +
                     count_occurrences(svg, "<text class=\"ordinal\"") +
                     count_occurrences(svg, "<line class=\"arrow\"");
    CHECK(primitives == 3 * n - 1);
  }
}
