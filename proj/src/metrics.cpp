#include "readorder/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace readorder {

namespace {

// Ranks of the boxes ordered in both sequences: pred ranks listed in gold
// order, both re-compacted to 0..n-1.
std::vector<int> common_pred_ranks(const ReadingSequence& pred, const ReadingSequence& gold) {
  std::vector<std::pair<int, int>> common;  // (gold ordinal, pred ordinal)
  for (const auto& [id, gold_ord] : gold.entries()) {
    if (gold_ord < 0) continue;
    auto pred_ord = pred.ordinal(id);
    if (!pred_ord || *pred_ord < 0) continue;
    common.emplace_back(gold_ord, *pred_ord);
  }
  std::sort(common.begin(), common.end());
  // Compact the pred ordinals to ranks within the common set.
  std::vector<int> pred_ordinals;
  pred_ordinals.reserve(common.size());
  for (const auto& [g, p] : common) pred_ordinals.push_back(p);
  std::vector<int> sorted = pred_ordinals;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> ranks;
  ranks.reserve(common.size());
  for (int p : pred_ordinals) {
    ranks.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), p) -
                                     sorted.begin()));
  }
  return ranks;
}

long count_inversions(std::vector<int>& values, std::vector<int>& scratch,
                      std::size_t lo, std::size_t hi) {
  if (hi - lo <= 1) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  long inv = count_inversions(values, scratch, lo, mid) +
             count_inversions(values, scratch, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (values[i] <= values[j]) {
      scratch[k++] = values[i++];
    } else {
      inv += static_cast<long>(mid - i);
      scratch[k++] = values[j++];
    }
  }
  while (i < mid) scratch[k++] = values[i++];
  while (j < hi) scratch[k++] = values[j++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, values.begin() + lo);
  return inv;
}

struct RankDetails {
  int n = 0;
  long concordant = 0;
  long discordant = 0;
  double sum_d2 = 0.0;
};

RankDetails rank_details(const ReadingSequence& pred, const ReadingSequence& gold) {
  std::vector<int> ranks = common_pred_ranks(pred, gold);
  RankDetails d;
  d.n = static_cast<int>(ranks.size());
  if (d.n < 2) return d;
  for (int i = 0; i < d.n; ++i) {
    double diff = static_cast<double>(ranks[i] - i);
    d.sum_d2 += diff * diff;
  }
  std::vector<int> scratch(ranks.size());
  long pairs = static_cast<long>(d.n) * (d.n - 1) / 2;
  d.discordant = count_inversions(ranks, scratch, 0, ranks.size());
  d.concordant = pairs - d.discordant;  // both restrictions are strict permutations
  return d;
}

}  // namespace

namespace {

// Pearson correlation of the pred ranks against 0..n-1; equal to the
// rank-difference form for strict permutations but computed along a
// different route.
double pearson_over_ranks(const std::vector<int>& ranks) {
  double n = static_cast<double>(ranks.size());
  double mean = (n - 1.0) / 2.0;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    double dx = static_cast<double>(i) - mean;
    double dy = static_cast<double>(ranks[i]) - mean;
    sxy += dx * dy;
    sxx += dx * dx;
  }
  return sxy / sxx;  // syy == sxx for permutation ranks
}

}  // namespace

RankCorrelation rank_correlation(const ReadingSequence& pred, const ReadingSequence& gold) {
  std::vector<int> ranks = common_pred_ranks(pred, gold);
  RankDetails d = rank_details(pred, gold);
  RankCorrelation out;
  out.n_common = d.n;
  if (d.n < 2) return out;
  double pairs = static_cast<double>(d.n) * (d.n - 1) / 2.0;
  out.tau = (static_cast<double>(d.concordant) - static_cast<double>(d.discordant)) / pairs;
  out.rho = pearson_over_ranks(ranks);
  return out;
}

std::optional<double> kendall_tau(const ReadingSequence& pred, const ReadingSequence& gold) {
  return rank_correlation(pred, gold).tau;
}

std::optional<double> spearman_rho(const ReadingSequence& pred, const ReadingSequence& gold) {
  return rank_correlation(pred, gold).rho;
}

std::optional<double> missing_rate(const ReadingSequence& seq, const Document& doc) {
  if (doc.boxes.empty()) return std::nullopt;
  std::size_t missing = 0;
  for (const auto& box : doc.boxes) {
    auto ord = seq.ordinal(box.id);
    if (!ord || *ord < 0) ++missing;
  }
  return static_cast<double>(missing) / static_cast<double>(doc.boxes.size());
}

namespace {

// UTF-8 to Unicode scalar values; malformed bytes decode individually.
std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t value = c;
    if (c >= 0xF0) {
      extra = 3;
      value = c & 0x07;
    } else if (c >= 0xE0) {
      extra = 2;
      value = c & 0x0F;
    } else if (c >= 0xC0) {
      extra = 1;
      value = c & 0x1F;
    }
    if (i + extra >= text.size() && extra > 0) {
      out.push_back(c);
      ++i;
      continue;
    }
    bool valid = true;
    for (int k = 1; k <= extra; ++k) {
      unsigned char cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) {
        valid = false;
        break;
      }
      value = (value << 6) | (cc & 0x3F);
    }
    if (!valid) {
      out.push_back(c);
      ++i;
      continue;
    }
    out.push_back(value);
    i += extra + 1;
  }
  return out;
}

long levenshtein_scalars(const std::vector<char32_t>& a, const std::vector<char32_t>& b) {
  if (a.empty()) return static_cast<long>(b.size());
  if (b.empty()) return static_cast<long>(a.size());
  std::vector<long> prev(b.size() + 1);
  std::vector<long> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<long>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<long>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      long sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string normalize_answer(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  auto is_space = [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (begin < end && is_space(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && is_space(static_cast<unsigned char>(text[end - 1]))) --end;
  std::string out = text.substr(begin, end - begin);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

long levenshtein(std::string_view a, std::string_view b) {
  return levenshtein_scalars(decode_utf8(a), decode_utf8(b));
}

AnlsScore anls(const std::string& pred, const std::vector<std::string>& golds,
               double threshold) {
  if (golds.empty()) throw std::invalid_argument("anls needs at least one gold answer");
  std::vector<char32_t> p = decode_utf8(normalize_answer(pred));
  double best = 0.0;
  for (const auto& gold : golds) {
    std::vector<char32_t> g = decode_utf8(normalize_answer(gold));
    double longest = static_cast<double>(std::max(p.size(), g.size()));
    double nl = longest == 0.0 ? 0.0 : static_cast<double>(levenshtein_scalars(p, g)) / longest;
    double s = nl < threshold ? 1.0 - nl : 0.0;
    best = std::max(best, s);
  }
  return AnlsScore{best, threshold};
}

AnlsScore mean_anls(const std::vector<QaPrediction>& questions, double threshold) {
  if (questions.empty()) throw std::invalid_argument("mean_anls needs at least one question");
  double sum = 0.0;
  for (const auto& q : questions) sum += anls(q.predicted, q.golds, threshold).value;
  return AnlsScore{sum / static_cast<double>(questions.size()), threshold};
}

namespace {

struct Accumulator {
  int documents = 0;
  int undefined = 0;
  double tau_sum = 0.0;
  double rho_sum = 0.0;
  double missing_sum = 0.0;
  // micro pools
  long concordant = 0;
  long discordant = 0;
  double sum_d2 = 0.0;
  double rho_denominator = 0.0;

  void add(const DocumentScore& row, const RankDetails& details) {
    ++documents;
    missing_sum += row.missing_rate;
    if (row.tau && row.rho) {
      tau_sum += *row.tau;
      rho_sum += *row.rho;
    } else {
      ++undefined;
    }
    if (details.n >= 2) {
      concordant += details.concordant;
      discordant += details.discordant;
      sum_d2 += details.sum_d2;
      double n = static_cast<double>(details.n);
      rho_denominator += n * (n * n - 1.0);
    }
  }

  GroupSummary summary(const std::string& name, bool micro) const {
    GroupSummary s;
    s.name = name;
    s.documents = documents;
    s.undefined = undefined;
    s.mean_missing_rate = documents > 0 ? missing_sum / documents : 0.0;
    if (micro) {
      long pairs = concordant + discordant;
      if (pairs > 0) {
        s.mean_tau = static_cast<double>(concordant - discordant) / static_cast<double>(pairs);
      }
      if (rho_denominator > 0.0) {
        s.mean_rho = 1.0 - 6.0 * sum_d2 / rho_denominator;
      }
    } else {
      int defined = documents - undefined;
      if (defined > 0) {
        s.mean_tau = tau_sum / defined;
        s.mean_rho = rho_sum / defined;
      }
    }
    return s;
  }
};

}  // namespace

CorpusReport evaluate_corpus(const std::vector<EvalInput>& inputs, bool micro) {
  if (inputs.empty()) throw std::invalid_argument("empty evaluation set");

  CorpusReport report;
  report.micro = micro;
  std::map<std::string, Accumulator> by_subset;
  Accumulator overall;

  for (const auto& input : inputs) {
    if (!input.doc || !input.gold || !input.pred) {
      throw std::invalid_argument("evaluation input with null document or sequence");
    }
    RankDetails details = rank_details(*input.pred, *input.gold);
    RankCorrelation rc = rank_correlation(*input.pred, *input.gold);
    DocumentScore row;
    row.doc_id = input.doc->doc_id;
    row.subset = input.doc->subset_tag;
    row.strategy = input.strategy;
    row.n_common = details.n;
    row.tau = rc.tau;
    row.rho = rc.rho;
    // The gold annotation's coverage; machine orders are full permutations.
    row.missing_rate = missing_rate(*input.gold, *input.doc).value_or(0.0);

    by_subset[to_string(input.doc->subset_tag)].add(row, details);
    overall.add(row, details);
    report.rows.push_back(std::move(row));
  }

  for (const auto& [name, acc] : by_subset) {
    report.subsets.push_back(acc.summary(name, micro));
  }
  report.overall = overall.summary(micro ? "overall" : "overall (macro over documents)", micro);
  return report;
}

}  // namespace readorder
