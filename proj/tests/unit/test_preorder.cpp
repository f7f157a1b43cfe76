#include <memory>
#include <stdexcept>
#include <algorithm>
#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "readorder/preorder.hpp"
#include "readorder/rng.hpp"
#include "readorder/synth.hpp"

using namespace readorder;
using testutil::box;

namespace {

Document line_doc(int n) {
  std::vector<BoundingBox> boxes;
  for (int i = 0; i < n; ++i) {
    boxes.push_back(box(std::string(1, static_cast<char>('a' + i)), i * 20.0, 0,
                        i * 20.0 + 10, 10));
  }
  return testutil::doc(std::move(boxes));
}

// Comparator induced by a strict total order over ids.
FunctionComparator oracle_for(const ReadingSequence& gold) {
  auto ranks = std::make_shared<std::map<std::string, int>>();
  for (const auto& [id, ord] : gold.entries()) (*ranks)[id] = ord;
  return FunctionComparator(
      [ranks](const BoundingBox& l, const BoundingBox& r) {
        return ranks->at(l.id) < ranks->at(r.id) ? 1.0 : 0.0;
      },
      true);
}

}  // namespace

TEST_CASE("preorder recovers the oracle's order") {
  Document d = line_doc(3);  // ids a, b, c
  ReadingSequence gold;
  gold.set("c", 0);
  gold.set("a", 1);
  gold.set("b", 2);
  auto cmp = oracle_for(gold);
  auto result = preorder(d, {"a", "b", "c"}, cmp);
  CHECK(result.arrangement == std::vector<std::string>{"c", "a", "b"});

  // the trace logs swap positions per pass, consistent with the swap count
  long logged = 0;
  for (const auto& pass : result.trace.pass_swaps) logged += static_cast<long>(pass.size());
  CHECK(logged == result.trace.swaps);
  CHECK(result.trace.swaps > 0);
}

TEST_CASE("preorder sorts every start permutation for oracle comparators (n <= 6)") {
  for (int n = 2; n <= 6; ++n) {
    Document d = line_doc(n);
    auto ids = testutil::ids_of(d);
    ReadingSequence gold = ReadingSequence::from_permutation(ids);
    auto cmp = oracle_for(gold);
    for (const auto& perm : testutil::all_permutations(n)) {
      std::vector<std::string> input;
      for (int idx : perm) input.push_back(ids[idx]);
      auto result = preorder(d, input, cmp);
      CHECK(result.arrangement == ids);
    }
  }
}

TEST_CASE("constant p=1 comparator never swaps") {
  Document d = line_doc(4);
  FunctionComparator always_left([](const BoundingBox&, const BoundingBox&) { return 1.0; });
  auto result = preorder(d, testutil::ids_of(d), always_left);
  CHECK(result.arrangement == testutil::ids_of(d));
  CHECK(result.trace.swaps == 0);
}

TEST_CASE("p == 0.5 keeps the current order (stability under indifference)") {
  Document d = line_doc(3);
  FunctionComparator indifferent([](const BoundingBox&, const BoundingBox&) { return 0.5; });
  auto result = preorder(d, {"c", "a", "b"}, indifferent);
  CHECK(result.arrangement == std::vector<std::string>{"c", "a", "b"});
  CHECK(result.trace.swaps == 0);
}

TEST_CASE("call count is l(l-1)/2 with cache and early exit off") {
  for (int l : {2, 3, 5, 10, 17}) {
    Document d = line_doc(l);
    FunctionComparator cmp([](const BoundingBox&, const BoundingBox&) { return 1.0; });
    auto result = preorder(d, testutil::ids_of(d), cmp);
    CHECK(result.trace.comparator_calls == static_cast<long>(l) * (l - 1) / 2);
  }
}

TEST_CASE("cache cuts comparator calls without changing the output") {
  Document d = line_doc(6);
  ReadingSequence gold = ReadingSequence::from_permutation(
      std::vector<std::string>{"f", "a", "e", "b", "d", "c"});
  auto cmp = oracle_for(gold);
  PreorderOptions with_cache;
  with_cache.cache = true;
  auto cached = preorder(d, testutil::ids_of(d), cmp, with_cache);
  auto plain = preorder(d, testutil::ids_of(d), cmp, {});
  CHECK(cached.arrangement == plain.arrangement);
  CHECK(cached.trace.comparator_calls < plain.trace.comparator_calls);
}

TEST_CASE("early exit preserves the result for consistent comparators") {
  Rng rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + static_cast<int>(rng.below(10));
    Document d = line_doc(n);
    auto ids = testutil::ids_of(d);
    auto gold_ids = ids;
    rng.shuffle(gold_ids);
    auto cmp = oracle_for(ReadingSequence::from_permutation(gold_ids));

    auto input = ids;
    rng.shuffle(input);
    PreorderOptions fast;
    fast.early_exit = true;
    auto with_exit = preorder(d, input, cmp, fast);
    auto without = preorder(d, input, cmp, {});
    CHECK(with_exit.arrangement == without.arrangement);
    CHECK(with_exit.trace.comparator_calls <= without.trace.comparator_calls);
  }
}

TEST_CASE("adversarial comparators still produce full permutations") {
  Rng rng(123);
  Document d = line_doc(8);
  FunctionComparator chaotic(
      [&rng](const BoundingBox&, const BoundingBox&) { return rng.uniform(); });
  auto result = preorder(d, testutil::ids_of(d), chaotic);
  CHECK(result.sequence.invariant_violations().empty());
  CHECK(result.arrangement.size() == 8);
  auto sorted = result.arrangement;
  std::sort(sorted.begin(), sorted.end());
  auto ids = testutil::ids_of(d);
  std::sort(ids.begin(), ids.end());
  CHECK(sorted == ids);
}

TEST_CASE("preorder is deterministic for a fixed comparator and input") {
  Document d = line_doc(7);
  ReadingSequence gold = ReadingSequence::from_permutation(
      std::vector<std::string>{"g", "e", "c", "a", "b", "d", "f"});
  auto cmp = oracle_for(gold);
  auto first = preorder(d, testutil::ids_of(d), cmp);
  auto second = preorder(d, testutil::ids_of(d), cmp);
  CHECK(first.arrangement == second.arrangement);
  CHECK(first.trace.comparator_calls == second.trace.comparator_calls);
  CHECK(first.trace.swaps == second.trace.swaps);
}

TEST_CASE("merge-sort mode agrees with the bubble passes for consistent comparators") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(rng.below(20));
    Document d = line_doc(n);
    auto gold_ids = testutil::ids_of(d);
    rng.shuffle(gold_ids);
    auto cmp = oracle_for(ReadingSequence::from_permutation(gold_ids));

    auto input = testutil::ids_of(d);
    rng.shuffle(input);
    PreorderOptions merge;
    merge.merge_sort = true;
    CHECK(preorder(d, input, cmp, merge).arrangement == gold_ids);
  }
}

TEST_CASE("empty input yields an empty sequence") {
  Document d;
  FunctionComparator cmp([](const BoundingBox&, const BoundingBox&) { return 1.0; });
  auto result = preorder(d, {}, cmp);
  CHECK(result.arrangement.empty());
  CHECK(result.trace.comparator_calls == 0);
}

TEST_CASE("preorder validates that the input is a permutation of the document") {
  Document d = line_doc(3);
  FunctionComparator cmp([](const BoundingBox&, const BoundingBox&) { return 1.0; });
  CHECK_THROWS_AS(preorder(d, {"a", "b"}, cmp), std::invalid_argument);
  CHECK_THROWS_AS(preorder(d, {"a", "a", "b"}, cmp), std::invalid_argument);
  CHECK_THROWS_AS(preorder(d, {"a", "b", "zzz"}, cmp), std::invalid_argument);
}

TEST_CASE("comparator failure aborts with the trace so far") {
  Document d = line_doc(5);
  int calls = 0;
  FunctionComparator flaky([&calls](const BoundingBox&, const BoundingBox&) -> double {
    if (++calls == 3) throw std::runtime_error("comparator died");
    return 1.0;
  });
  try {
    preorder(d, testutil::ids_of(d), flaky);
    FAIL("expected ComparatorFailure");
  } catch (const ComparatorFailure& e) {
    CHECK(e.trace().comparator_calls == 2);  // two successful calls before the third
  }
}

TEST_CASE("order_with_strategy dispatches by name") {
  SynthSpec spec;
  spec.rows = 3;
  spec.cols = 3;
  spec.seed = 21;
  auto sample = synth(spec);

  CHECK(order_with_strategy(sample.doc, "default-ocr") == default_order(sample.doc));
  CHECK(order_with_strategy(sample.doc, "z-order") == z_order(sample.doc));
  CHECK(order_with_strategy(sample.doc, "xy-order") == xy_order(sample.doc));
  CHECK_THROWS_AS(order_with_strategy(sample.doc, "bogus"), std::invalid_argument);
  CHECK_THROWS_AS(order_with_strategy(sample.doc, "model"), std::invalid_argument);
  CHECK_THROWS_AS(order_with_strategy(sample.doc, "external-model"), std::invalid_argument);
}
