#include "readorder/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace readorder {

using nlohmann::json;
using nlohmann::ordered_json;

CorpusFormat corpus_format_from_string(const std::string& name) {
  if (name == "canonical") return CorpusFormat::kCanonical;
  if (name == "doctrack") return CorpusFormat::kDoctrack;
  throw std::invalid_argument("unknown corpus format: " + name);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw SchemaError(context + ": " + what);
}

json parse_json(const std::string& text, const std::string& context) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(context, "not valid JSON");
  return j;
}

double require_number(const json& j, const char* field, const std::string& context) {
  if (!j.contains(field) || !j[field].is_number()) {
    fail(context, std::string("missing or non-numeric field '") + field + "'");
  }
  return j[field].get<double>();
}

std::string require_string(const json& j, const char* field, const std::string& context) {
  if (!j.contains(field) || !j[field].is_string()) {
    fail(context, std::string("missing or non-string field '") + field + "'");
  }
  return j[field].get<std::string>();
}

ReadingSequence sequence_from_entries(const json& entries, const std::string& context) {
  if (!entries.is_array()) fail(context, "order list must be an array");
  ReadingSequence seq;
  for (const auto& entry : entries) {
    if (!entry.is_object()) fail(context, "order entry must be an object");
    std::string id = require_string(entry, "id", context);
    if (!entry.contains("ordinal") || !entry["ordinal"].is_number_integer()) {
      fail(context, "order entry for box '" + id + "' needs an integer 'ordinal'");
    }
    seq.set(id, entry["ordinal"].get<int>());
  }
  return seq;
}

ordered_json sequence_to_entries(const ReadingSequence& seq) {
  // Ordered entries first, then missing ones; stable within each group.
  std::vector<std::pair<int, std::string>> rows;
  for (const auto& [id, ord] : seq.entries()) {
    rows.emplace_back(ord < 0 ? std::numeric_limits<int>::max() : ord, id);
  }
  std::sort(rows.begin(), rows.end());
  ordered_json out = ordered_json::array();
  for (const auto& [ord, id] : rows) {
    ordered_json entry;
    entry["id"] = id;
    entry["ordinal"] = *seq.ordinal(id);
    out.push_back(entry);
  }
  return out;
}

LoadedDocument canonical_from_json(const json& j, const std::string& context) {
  LoadedDocument out;
  out.doc.doc_id = require_string(j, "doc_id", context);
  out.doc.page_width = require_number(j, "page_width", context);
  out.doc.page_height = require_number(j, "page_height", context);
  std::string tag = j.contains("subset_tag") ? require_string(j, "subset_tag", context) : "other";
  try {
    out.doc.subset_tag = subset_tag_from_string(tag);
  } catch (const std::invalid_argument& e) {
    fail(context, e.what());
  }
  if (j.contains("image_path")) {
    out.doc.image_path = require_string(j, "image_path", context);
  }

  if (!j.contains("boxes") || !j["boxes"].is_array()) {
    fail(context, "missing 'boxes' array");
  }
  for (const auto& jb : j["boxes"]) {
    BoundingBox box;
    box.id = require_string(jb, "id", context);
    box.text = jb.contains("text") ? require_string(jb, "text", context) : "";
    if (!jb.contains("bbox") || !jb["bbox"].is_array() || jb["bbox"].size() != 4) {
      fail(context, "box '" + box.id + "' needs bbox [x_up, y_up, x_down, y_down]");
    }
    for (const auto& v : jb["bbox"]) {
      if (!v.is_number()) fail(context, "box '" + box.id + "' has a non-numeric bbox value");
    }
    box.x_up = jb["bbox"][0].get<double>();
    box.y_up = jb["bbox"][1].get<double>();
    box.x_down = jb["bbox"][2].get<double>();
    box.y_down = jb["bbox"][3].get<double>();
    out.doc.boxes.push_back(std::move(box));
  }

  if (j.contains("qa")) {
    if (!j["qa"].is_array()) fail(context, "'qa' must be an array");
    for (const auto& jq : j["qa"]) {
      QaPair qa;
      qa.question = require_string(jq, "question", context);
      if (!jq.contains("answers") || !jq["answers"].is_array()) {
        fail(context, "qa entry needs an 'answers' array");
      }
      for (const auto& a : jq["answers"]) {
        if (!a.is_string()) fail(context, "qa answers must be strings");
        qa.answers.push_back(a.get<std::string>());
      }
      out.doc.qa.push_back(std::move(qa));
    }
  }

  if (j.contains("gold_order")) {
    ReadingSequence gold = sequence_from_entries(j["gold_order"], context);
    for (const auto& [id, ord] : gold.entries()) {
      if (out.doc.box_index(id) < 0) {
        fail(context, "gold_order references unknown box '" + id + "'");
      }
    }
    out.gold = std::move(gold);
  }

  auto violations = validate_document(out.doc);
  if (!violations.empty()) {
    fail(context, "invalid document: box '" + violations.front().box_id + "': " +
                      violations.front().rule);
  }
  return out;
}

// Adapter for released eye-tracking corpora built on FUNSD-style annotation
// files: {"form": [{"id", "text", "box": [x1,y1,x2,y2]}, ...]} with the
// reading order either as a top-level "reading_order" id list or a per-item
// "order"/"rank" field. Page size falls back to the box extent when absent.
// TODO: finalize field mapping against the published release archive.
LoadedDocument doctrack_from_json(const json& j, const std::string& context) {
  if (!j.contains("form") || !j["form"].is_array()) {
    fail(context, "expected a 'form' array in the annotation file");
  }
  LoadedDocument out;
  out.doc.doc_id = j.contains("doc_id") && j["doc_id"].is_string()
                       ? j["doc_id"].get<std::string>()
                       : context;
  if (j.contains("subset") && j["subset"].is_string()) {
    try {
      out.doc.subset_tag = subset_tag_from_string(j["subset"].get<std::string>());
    } catch (const std::invalid_argument&) {
      out.doc.subset_tag = SubsetTag::kOther;
    }
  }

  std::vector<std::pair<std::string, int>> explicit_order;  // (id, rank)
  for (const auto& item : j["form"]) {
    BoundingBox box;
    if (item.contains("id") && item["id"].is_number_integer()) {
      box.id = std::to_string(item["id"].get<long>());
    } else if (item.contains("id") && item["id"].is_string()) {
      box.id = item["id"].get<std::string>();
    } else {
      fail(context, "form item without an 'id'");
    }
    box.text = item.contains("text") && item["text"].is_string()
                   ? item["text"].get<std::string>()
                   : "";
    const char* box_field = item.contains("box") ? "box" : "bbox";
    if (!item.contains(box_field) || !item[box_field].is_array() ||
        item[box_field].size() != 4) {
      fail(context, "form item '" + box.id + "' needs a 4-element '" + box_field + "'");
    }
    box.x_up = item[box_field][0].get<double>();
    box.y_up = item[box_field][1].get<double>();
    box.x_down = item[box_field][2].get<double>();
    box.y_down = item[box_field][3].get<double>();
    for (const char* rank_field : {"order", "rank", "reading_order"}) {
      if (item.contains(rank_field) && item[rank_field].is_number_integer()) {
        explicit_order.emplace_back(box.id, item[rank_field].get<int>());
        break;
      }
    }
    out.doc.boxes.push_back(std::move(box));
  }

  if (j.contains("width") && j["width"].is_number() && j.contains("height") &&
      j["height"].is_number()) {
    out.doc.page_width = j["width"].get<double>();
    out.doc.page_height = j["height"].get<double>();
  } else {
    for (const auto& box : out.doc.boxes) {
      out.doc.page_width = std::max(out.doc.page_width, box.x_down);
      out.doc.page_height = std::max(out.doc.page_height, box.y_down);
    }
    out.doc.page_width = std::ceil(out.doc.page_width);
    out.doc.page_height = std::ceil(out.doc.page_height);
  }

  if (j.contains("reading_order") && j["reading_order"].is_array()) {
    ReadingSequence gold;
    for (const auto& box : out.doc.boxes) gold.set(box.id, ReadingSequence::kMissing);
    int ordinal = 0;
    for (const auto& v : j["reading_order"]) {
      std::string id = v.is_string() ? v.get<std::string>() : std::to_string(v.get<long>());
      if (out.doc.box_index(id) < 0) {
        fail(context, "reading_order references unknown box '" + id + "'");
      }
      gold.set(id, ordinal++);
    }
    out.gold = std::move(gold);
  } else if (!explicit_order.empty()) {
    // Per-item ranks; -1 marks missing, remaining ranks are compacted.
    std::sort(explicit_order.begin(), explicit_order.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    ReadingSequence gold;
    for (const auto& box : out.doc.boxes) gold.set(box.id, ReadingSequence::kMissing);
    int ordinal = 0;
    for (const auto& [id, rank] : explicit_order) {
      if (rank < 0) continue;
      gold.set(id, ordinal++);
    }
    out.gold = std::move(gold);
  }

  auto violations = validate_document(out.doc);
  if (!violations.empty()) {
    fail(context, "invalid document: box '" + violations.front().box_id + "': " +
                      violations.front().rule);
  }
  return out;
}

}  // namespace

LoadedDocument document_from_json(const std::string& text, const std::string& context) {
  return canonical_from_json(parse_json(text, context), context);
}

std::string document_to_json(const Document& doc, const ReadingSequence* gold) {
  ordered_json j;
  j["doc_id"] = doc.doc_id;
  j["page_width"] = doc.page_width;
  j["page_height"] = doc.page_height;
  j["subset_tag"] = to_string(doc.subset_tag);
  if (doc.image_path) j["image_path"] = *doc.image_path;
  j["boxes"] = ordered_json::array();
  for (const auto& box : doc.boxes) {
    ordered_json jb;
    jb["id"] = box.id;
    jb["text"] = box.text;
    jb["bbox"] = {box.x_up, box.y_up, box.x_down, box.y_down};
    j["boxes"].push_back(std::move(jb));
  }
  if (gold) j["gold_order"] = sequence_to_entries(*gold);
  if (!doc.qa.empty()) {
    j["qa"] = ordered_json::array();
    for (const auto& qa : doc.qa) {
      ordered_json jq;
      jq["question"] = qa.question;
      jq["answers"] = qa.answers;
      j["qa"].push_back(std::move(jq));
    }
  }
  return j.dump(2) + "\n";
}

LoadedDocument load_document(const std::filesystem::path& path, CorpusFormat format) {
  std::string text = read_file(path);
  json j = parse_json(text, path.string());
  if (format == CorpusFormat::kCanonical) return canonical_from_json(j, path.string());
  LoadedDocument out = doctrack_from_json(j, path.string());
  if (out.doc.doc_id == path.string()) out.doc.doc_id = path.stem().string();
  return out;
}

void save_document(const std::filesystem::path& path, const Document& doc,
                   const ReadingSequence* gold) {
  write_file(path, document_to_json(doc, gold));
}

GazeTrajectory gaze_from_json(const std::string& text, const std::string& context) {
  json j = parse_json(text, context);
  GazeTrajectory traj;
  traj.doc_id = require_string(j, "doc_id", context);
  if (!j.contains("points") || !j["points"].is_array()) {
    fail(context, "missing 'points' array");
  }
  for (const auto& jp : j["points"]) {
    GazePoint point;
    point.t = require_number(jp, "t", context);
    point.x = require_number(jp, "x", context);
    point.y = require_number(jp, "y", context);
    if (jp.contains("dur")) point.duration = require_number(jp, "dur", context);
    if (jp.contains("pupil")) point.pupil = require_number(jp, "pupil", context);
    traj.points.push_back(point);
  }
  return traj;
}

std::string gaze_to_json(const GazeTrajectory& traj) {
  ordered_json j;
  j["doc_id"] = traj.doc_id;
  j["points"] = ordered_json::array();
  for (const auto& point : traj.points) {
    ordered_json jp;
    jp["t"] = point.t;
    jp["x"] = point.x;
    jp["y"] = point.y;
    if (point.duration) jp["dur"] = *point.duration;
    if (point.pupil) jp["pupil"] = *point.pupil;
    j["points"].push_back(std::move(jp));
  }
  return j.dump(2) + "\n";
}

GazeTrajectory load_gaze(const std::filesystem::path& path) {
  return gaze_from_json(read_file(path), path.string());
}

void save_gaze(const std::filesystem::path& path, const GazeTrajectory& traj) {
  write_file(path, gaze_to_json(traj));
}

OrderFile order_from_json(const std::string& text, const std::string& context) {
  json j = parse_json(text, context);
  OrderFile out;
  out.doc_id = require_string(j, "doc_id", context);
  out.strategy = j.contains("strategy") ? require_string(j, "strategy", context) : "";
  if (!j.contains("order")) fail(context, "missing 'order' array");
  out.order = sequence_from_entries(j["order"], context);
  return out;
}

std::string order_to_json(const OrderFile& order) {
  ordered_json j;
  j["doc_id"] = order.doc_id;
  j["strategy"] = order.strategy;
  j["order"] = sequence_to_entries(order.order);
  return j.dump(2) + "\n";
}

OrderFile load_order(const std::filesystem::path& path) {
  return order_from_json(read_file(path), path.string());
}

void save_order(const std::filesystem::path& path, const OrderFile& order) {
  write_file(path, order_to_json(order));
}

std::vector<std::filesystem::path> list_json_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::filesystem::path> list_document_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& file : list_json_files(dir)) {
    // gaze and order files live next to their documents
    std::string name = file.filename().string();
    if (name.ends_with(".gaze.json") || name.ends_with(".order.json")) continue;
    out.push_back(file);
  }
  return out;
}

std::vector<LoadedDocument> ingest(const std::filesystem::path& path, CorpusFormat format) {
  std::vector<LoadedDocument> out;
  if (std::filesystem::is_directory(path)) {
    for (const auto& file : list_document_files(path)) {
      out.push_back(load_document(file, format));
    }
  } else {
    out.push_back(load_document(path, format));
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<std::pair<std::string, const Document*>>& docs) {
  CorpusStats stats;
  for (const auto& [split, doc] : docs) {
    auto& per_subset = stats.table[split];
    for (const std::string& key : {to_string(doc->subset_tag), std::string("total")}) {
      auto& counts = per_subset[key];
      counts.docs += 1;
      counts.entities += static_cast<long>(doc->boxes.size());
      for (const auto& box : doc->boxes) {
        bool in_token = false;
        for (unsigned char c : box.text) {
          bool space = std::isspace(c) != 0;
          if (!space && !in_token) ++counts.tokens;
          in_token = !space;
        }
      }
    }
  }
  return stats;
}

std::string stats_to_text(const CorpusStats& stats) {
  std::ostringstream out;
  out << "corpus statistics (entities approximated as boxes, tokens as whitespace segments)\n";
  const std::vector<std::string> subsets = {"weak", "structured", "infograph", "other", "total"};
  char buf[64];
  for (const auto& [split, per_subset] : stats.table) {
    out << "\n[" << split << "]\n      ";
    for (const auto& s : subsets) {
      if (!per_subset.count(s)) continue;
      std::snprintf(buf, sizeof(buf), "%12s", s.c_str());
      out << buf;
    }
    out << "\n";
    for (const char* row : {"doc", "ent", "tok"}) {
      out << "  " << row << " ";
      for (const auto& s : subsets) {
        auto it = per_subset.find(s);
        if (it == per_subset.end()) continue;
        long v = std::string(row) == "doc"   ? it->second.docs
                 : std::string(row) == "ent" ? it->second.entities
                                             : it->second.tokens;
        std::snprintf(buf, sizeof(buf), "%12ld", v);
        out << buf;
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string stats_to_json(const CorpusStats& stats) {
  ordered_json j;
  j["note"] = "entities approximated as boxes; tokens as whitespace segments";
  for (const auto& [split, per_subset] : stats.table) {
    for (const auto& [subset, counts] : per_subset) {
      j["splits"][split][subset] = {
          {"doc", counts.docs}, {"ent", counts.entities}, {"tok", counts.tokens}};
    }
  }
  return j.dump(2) + "\n";
}

namespace {

ordered_json summary_to_json(const GroupSummary& s) {
  ordered_json j;
  j["name"] = s.name;
  j["documents"] = s.documents;
  j["undefined"] = s.undefined;
  j["mean_tau"] = s.mean_tau ? ordered_json(*s.mean_tau) : ordered_json(nullptr);
  j["mean_rho"] = s.mean_rho ? ordered_json(*s.mean_rho) : ordered_json(nullptr);
  j["mean_missing_rate"] = s.mean_missing_rate;
  return j;
}

}  // namespace

std::string report_to_json(const CorpusReport& report) {
  ordered_json j;
  j["aggregation"] = report.micro ? "micro (pooled pairs)" : "macro (mean over documents)";
  j["documents"] = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json jr;
    jr["doc_id"] = row.doc_id;
    jr["subset"] = to_string(row.subset);
    jr["strategy"] = row.strategy;
    jr["tau"] = row.tau ? ordered_json(*row.tau) : ordered_json(nullptr);
    jr["rho"] = row.rho ? ordered_json(*row.rho) : ordered_json(nullptr);
    jr["missing_rate"] = row.missing_rate;
    jr["n_common"] = row.n_common;
    j["documents"].push_back(std::move(jr));
  }
  j["subsets"] = ordered_json::array();
  for (const auto& s : report.subsets) j["subsets"].push_back(summary_to_json(s));
  j["overall"] = summary_to_json(report.overall);
  return j.dump(2) + "\n";
}

std::string report_to_text(const CorpusReport& report) {
  std::ostringstream out;
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("   -  ");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%6.4f", *v);
    return std::string(buf);
  };
  out << (report.micro ? "aggregation: micro (pooled pairs)\n"
                       : "aggregation: macro (mean over documents)\n");
  out << "subset                          docs  undef  tau     rho     missing\n";
  auto line = [&](const GroupSummary& s) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-30s %5d  %5d  %s  %s  %6.2f%%\n", s.name.c_str(),
                  s.documents, s.undefined, fmt(s.mean_tau).c_str(), fmt(s.mean_rho).c_str(),
                  100.0 * s.mean_missing_rate);
    out << buf;
  };
  for (const auto& s : report.subsets) line(s);
  line(report.overall);
  return out.str();
}

}  // namespace readorder
