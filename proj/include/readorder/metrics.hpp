#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "readorder/document.hpp"
#include "readorder/sequence.hpp"

namespace readorder {

// Rank correlations over the boxes ordered in BOTH sequences. tau and rho are
// unset when fewer than 2 boxes are common; never a fabricated number.
struct RankCorrelation {
  std::optional<double> tau;
  std::optional<double> rho;
  int n_common = 0;
};

RankCorrelation rank_correlation(const ReadingSequence& pred, const ReadingSequence& gold);
std::optional<double> kendall_tau(const ReadingSequence& pred, const ReadingSequence& gold);
std::optional<double> spearman_rho(const ReadingSequence& pred, const ReadingSequence& gold);

// (#boxes at kMissing or absent from seq) / (#boxes); unset for an empty doc.
std::optional<double> missing_rate(const ReadingSequence& seq, const Document& doc);

// Minimum insertions + deletions + substitutions over Unicode scalar values.
long levenshtein(std::string_view a, std::string_view b);

struct AnlsScore {
  double value = 0.0;
  double threshold = 0.5;
};

// Normalized Levenshtein similarity of pred against the best gold answer:
// strings are lowercased and whitespace-trimmed, nl = distance / max length,
// similarity = 1 - nl when nl < threshold else 0. Throws on empty golds.
AnlsScore anls(const std::string& pred, const std::vector<std::string>& golds,
               double threshold = 0.5);

struct QaPrediction {
  std::string predicted;
  std::vector<std::string> golds;
};

// Mean per-question score over a corpus of answers.
AnlsScore mean_anls(const std::vector<QaPrediction>& questions, double threshold = 0.5);

struct DocumentScore {
  std::string doc_id;
  SubsetTag subset = SubsetTag::kOther;
  std::string strategy;
  std::optional<double> tau;
  std::optional<double> rho;
  double missing_rate = 0.0;
  int n_common = 0;
};

struct GroupSummary {
  std::string name;
  int documents = 0;
  int undefined = 0;  // documents excluded from the correlation means
  std::optional<double> mean_tau;
  std::optional<double> mean_rho;
  double mean_missing_rate = 0.0;
};

struct CorpusReport {
  std::vector<DocumentScore> rows;
  std::vector<GroupSummary> subsets;
  GroupSummary overall;
  // macro: arithmetic mean of per-document scores (the default, labeled in
  // the report); micro: correlations pooled over pairs before dividing.
  bool micro = false;
};

struct EvalInput {
  const Document* doc = nullptr;
  const ReadingSequence* gold = nullptr;
  const ReadingSequence* pred = nullptr;
  std::string strategy;
};

// Per-document scores aggregated within subset_tag groups and overall.
// Throws std::invalid_argument on an empty evaluation set.
CorpusReport evaluate_corpus(const std::vector<EvalInput>& inputs, bool micro = false);

}  // namespace readorder
