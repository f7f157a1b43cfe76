#include "readorder/orderers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace readorder {

double ZOrderConfig::effective_threshold(const Document& doc) const {
  if (y_threshold) {
    if (*y_threshold < 0.0) throw std::invalid_argument("y_threshold must be >= 0");
    return *y_threshold;
  }
  return doc.median_box_height() / 2.0;
}

ReadingSequence default_order(const Document& doc) {
  ReadingSequence seq;
  for (std::size_t i = 0; i < doc.boxes.size(); ++i) {
    seq.set(doc.boxes[i].id, static_cast<int>(i));
  }
  return seq;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

ReadingSequence z_order(const Document& doc, const ZOrderConfig& cfg) {
  double threshold = cfg.effective_threshold(doc);
  std::size_t n = doc.boxes.size();

  std::vector<double> yc(n);
  for (std::size_t i = 0; i < n; ++i) yc[i] = centroid(doc.boxes[i]).y;

  // Transitive closure: staircase layouts merge into one line on purpose.
  UnionFind lines(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(yc[i] - yc[j]) < threshold) lines.unite(static_cast<int>(i), static_cast<int>(j));
    }
  }

  struct Line {
    double mean_y = 0.0;
    double min_x = std::numeric_limits<double>::infinity();
    std::string min_id;
    std::vector<int> members;
  };
  std::vector<int> root_of(n);
  std::vector<Line> grouped;
  std::vector<int> line_of_root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    int root = lines.find(static_cast<int>(i));
    if (line_of_root[root] < 0) {
      line_of_root[root] = static_cast<int>(grouped.size());
      grouped.emplace_back();
    }
    Line& line = grouped[line_of_root[root]];
    line.members.push_back(static_cast<int>(i));
    line.mean_y += yc[i];
    if (doc.boxes[i].x_up < line.min_x) line.min_x = doc.boxes[i].x_up;
    if (line.min_id.empty() || doc.boxes[i].id < line.min_id) line.min_id = doc.boxes[i].id;
  }
  for (auto& line : grouped) line.mean_y /= static_cast<double>(line.members.size());

  std::sort(grouped.begin(), grouped.end(), [](const Line& a, const Line& b) {
    if (a.mean_y != b.mean_y) return a.mean_y < b.mean_y;
    if (a.min_x != b.min_x) return a.min_x < b.min_x;
    return a.min_id < b.min_id;
  });

  ReadingSequence seq;
  int ordinal = 0;
  for (auto& line : grouped) {
    std::sort(line.members.begin(), line.members.end(), [&](int a, int b) {
      const auto& ba = doc.boxes[a];
      const auto& bb = doc.boxes[b];
      if (ba.x_up != bb.x_up) return ba.x_up < bb.x_up;
      if (ba.y_up != bb.y_up) return ba.y_up < bb.y_up;
      return ba.id < bb.id;
    });
    for (int m : line.members) seq.set(doc.boxes[m].id, ordinal++);
  }
  return seq;
}

namespace {

bool y_overlap(const BoundingBox& a, const BoundingBox& b) {
  return std::max(a.y_up, b.y_up) < std::min(a.y_down, b.y_down);
}

// Key for "next run" selection: y dominates, then x, then the remaining
// coordinates and the id for determinism.
bool scan_key_less(const BoundingBox& a, const BoundingBox& b) {
  if (a.y_up != b.y_up) return a.y_up < b.y_up;
  if (a.x_up != b.x_up) return a.x_up < b.x_up;
  if (a.y_down != b.y_down) return a.y_down < b.y_down;
  return a.id < b.id;
}

}  // namespace

ReadingSequence xy_order(const Document& doc) {
  std::size_t n = doc.boxes.size();
  std::vector<bool> visited(n, false);
  std::vector<int> result;
  result.reserve(n);

  auto next_run_start = [&]() {
    int best = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (visited[i]) continue;
      if (best < 0 || scan_key_less(doc.boxes[i], doc.boxes[best])) best = static_cast<int>(i);
    }
    return best;
  };

  int current = next_run_start();
  while (current >= 0) {
    visited[current] = true;
    result.push_back(current);

    // Right search: nearest unvisited box starting at or right of the current
    // one with overlapping y-extent.
    int next = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (visited[i]) continue;
      const auto& cand = doc.boxes[i];
      const auto& cur = doc.boxes[current];
      if (cand.x_up < cur.x_up || !y_overlap(cand, cur)) continue;
      if (next < 0) {
        next = static_cast<int>(i);
        continue;
      }
      const auto& best = doc.boxes[next];
      if (cand.x_up != best.x_up ? cand.x_up < best.x_up : scan_key_less(cand, best)) {
        next = static_cast<int>(i);
      }
    }
    current = next >= 0 ? next : next_run_start();
  }

  ReadingSequence seq;
  for (std::size_t i = 0; i < result.size(); ++i) {
    seq.set(doc.boxes[result[i]].id, static_cast<int>(i));
  }
  return seq;
}

}  // namespace readorder
