#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "readorder/document.hpp"
#include "readorder/gaze.hpp"
#include "readorder/metrics.hpp"
#include "readorder/sequence.hpp"

namespace readorder {

// Malformed input; the message names the offending file and field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CorpusFormat { kCanonical, kDoctrack };

CorpusFormat corpus_format_from_string(const std::string& name);

struct LoadedDocument {
  Document doc;
  std::optional<ReadingSequence> gold;  // from gold_order, when present
};

// Canonical document file: UTF-8 JSON, one document per file, with fields
// doc_id, page_width, page_height, subset_tag, boxes [{id, text, bbox}],
// optional gold_order [{id, ordinal}], qa [{question, answers}], image_path.
LoadedDocument document_from_json(const std::string& text, const std::string& context);
std::string document_to_json(const Document& doc, const ReadingSequence* gold = nullptr);

LoadedDocument load_document(const std::filesystem::path& path,
                             CorpusFormat format = CorpusFormat::kCanonical);
void save_document(const std::filesystem::path& path, const Document& doc,
                   const ReadingSequence* gold = nullptr);

// Canonical gaze file: {doc_id, points: [{t, x, y, dur?, pupil?}]}.
GazeTrajectory gaze_from_json(const std::string& text, const std::string& context);
std::string gaze_to_json(const GazeTrajectory& traj);
GazeTrajectory load_gaze(const std::filesystem::path& path);
void save_gaze(const std::filesystem::path& path, const GazeTrajectory& traj);

// Machine order file: {doc_id, strategy, order: [{id, ordinal}]}.
struct OrderFile {
  std::string doc_id;
  std::string strategy;
  ReadingSequence order;
};

OrderFile order_from_json(const std::string& text, const std::string& context);
std::string order_to_json(const OrderFile& order);
OrderFile load_order(const std::filesystem::path& path);
void save_order(const std::filesystem::path& path, const OrderFile& order);

// *.json files directly inside dir, sorted by filename.
std::vector<std::filesystem::path> list_json_files(const std::filesystem::path& dir);

// Same, minus *.gaze.json and *.order.json side files.
std::vector<std::filesystem::path> list_document_files(const std::filesystem::path& dir);

// Loads one file or every *.json file in a directory.
std::vector<LoadedDocument> ingest(const std::filesystem::path& path,
                                   CorpusFormat format = CorpusFormat::kCanonical);

// Corpus statistics. Entities are approximated as boxes and tokens as
// whitespace segments of box text; the output labels the approximation.
struct CorpusStats {
  struct Counts {
    long docs = 0;
    long entities = 0;
    long tokens = 0;
  };
  // split -> subset -> counts; subset "total" aggregates the split.
  std::map<std::string, std::map<std::string, Counts>> table;
};

CorpusStats corpus_stats(const std::vector<std::pair<std::string, const Document*>>& docs);
std::string stats_to_text(const CorpusStats& stats);
std::string stats_to_json(const CorpusStats& stats);

std::string report_to_json(const CorpusReport& report);
std::string report_to_text(const CorpusReport& report);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace readorder
