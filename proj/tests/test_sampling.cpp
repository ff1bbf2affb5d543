#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "rpm/error.hpp"
#include "rpm/sampling.hpp"

using namespace rpm;

namespace {

// Distinct rows: column x0 is the source row index.
Dataset with_counts(const std::vector<std::size_t>& counts) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      rows.push_back({static_cast<double>(rows.size()), static_cast<double>(c)});
      labels.push_back("k" + std::to_string(c));
    }
  }
  return oracle::numeric_dataset(rows, labels);
}

void check_plan(const Dataset& d, const FoldPlan& plan, std::size_t k) {
  REQUIRE(plan.folds.size() == k);
  std::vector<int> seen(d.num_rows(), 0);
  for (const auto& fold : plan.folds) {
    CHECK(std::is_sorted(fold.begin(), fold.end()));
    for (auto r : fold) ++seen[r];
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  for (std::size_t c = 0; c < d.num_classes(); ++c) {
    std::size_t lo = d.num_rows(), hi = 0;
    for (const auto& fold : plan.folds) {
      const auto n = static_cast<std::size_t>(std::count_if(fold.begin(), fold.end(), [&](auto r) { return d.class_of(r) == c; }));
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    CHECK(hi - lo <= 1);
  }
  std::size_t lo = d.num_rows(), hi = 0;
  for (const auto& fold : plan.folds) {
    lo = std::min(lo, fold.size());
    hi = std::max(hi, fold.size());
  }
  CHECK(hi - lo <= 1);
}

}  // namespace

TEST_CASE("bootstrap_balance yields exactly per_class_n of every class") {
  const Dataset d = with_counts({90, 10});
  const Dataset b = bootstrap_balance(d, 50, 7);
  CHECK(b.num_rows() == 100);
  CHECK(b.class_counts() == std::vector<std::size_t>{50, 50});

  std::mt19937 gen(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::size_t> counts;
    const std::size_t m = 2 + gen() % 4;
    for (std::size_t c = 0; c < m; ++c) counts.push_back(1 + gen() % 60);
    const std::size_t n = 1 + gen() % 80;
    const Dataset src = with_counts(counts);
    const Dataset out = bootstrap_balance(src, n, gen());
    CHECK(out.num_rows() == m * n);
    CHECK(out.class_counts() == std::vector<std::size_t>(m, n));
  }
}

TEST_CASE("sampling without replacement below the minority size") {
  const Dataset d = with_counts({40, 25, 30});
  const Dataset b = bootstrap_balance(d, 25, 3);
  std::set<double> ids;
  for (std::size_t r = 0; r < b.num_rows(); ++r) ids.insert(b.at(r, 0));
  CHECK(ids.size() == b.num_rows());
}

TEST_CASE("bootstrap_balance is deterministic and validates input") {
  const Dataset d = with_counts({30, 12});
  CHECK(bootstrap_balance(d, 20, 99) == bootstrap_balance(d, 20, 99));
  CHECK_THROWS_AS(bootstrap_balance(d, 0, 1), ConfigError);
  CHECK_THROWS_AS(bootstrap_balance(with_counts({5}), 3, 1), DataError);
  const Dataset absent({{"x", AttributeKind::numeric, {}, AttributeRole::regular},
                        {"y", AttributeKind::nominal, {"a", "b"}, AttributeRole::target}},
                       {1.0, 0.0, 2.0, 0.0});
  CHECK_THROWS_AS(bootstrap_balance(absent, 2, 1), DataError);
}

TEST_CASE("stratified folds on balanced data") {
  const Dataset d = with_counts({50, 50});
  const FoldPlan plan = stratified_folds(d, 10, 1);
  check_plan(d, plan, 10);
  for (const auto& fold : plan.folds) {
    CHECK(fold.size() == 10);
    CHECK(std::count_if(fold.begin(), fold.end(), [&](auto r) { return d.class_of(r) == 0; }) == 5);
  }
}

TEST_CASE("stratified fold edge cases") {
  const Dataset d = with_counts({60, 43});
  const FoldPlan single = stratified_folds(d, 1, 4);
  REQUIRE(single.folds.size() == 1);
  CHECK(single.folds[0].size() == 103);

  const FoldPlan ten = stratified_folds(d, 10, 4);
  for (const auto& fold : ten.folds) CHECK((fold.size() == 10 || fold.size() == 11));
  CHECK(stratified_folds(d, 10, 4) == ten);
  CHECK_THROWS_AS(stratified_folds(with_counts({20, 9}), 10, 1), DataError);

  const auto train = ten.training_indices(3);
  CHECK(train.size() + ten.folds[3].size() == d.num_rows());
}

TEST_CASE("fold invariants over random class distributions") {
  std::mt19937 gen(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 2 + gen() % 9;
    std::vector<std::size_t> counts;
    const std::size_t m = 2 + gen() % 4;
    for (std::size_t c = 0; c < m; ++c) counts.push_back(k + gen() % 40);
    const Dataset d = with_counts(counts);
    check_plan(d, stratified_folds(d, k, gen()), k);
  }
}
