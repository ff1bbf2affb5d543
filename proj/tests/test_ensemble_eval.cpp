#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rpm/ensemble_eval.hpp"
#include "rpm/error.hpp"

using namespace rpm;

namespace {

ConfusionMatrix matrix(const std::vector<std::vector<std::size_t>>& counts) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < counts.size(); ++i) labels.push_back("c" + std::to_string(i));
  ConfusionMatrix cm(labels);
  cm.counts = counts;
  return cm;
}

// Models with fixed priors that always predict a given label.
std::vector<TrainedModel> committee(const std::vector<std::size_t>& predictions, const std::vector<std::size_t>& priors) {
  std::vector<TrainedModel> out;
  for (auto p : predictions) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < priors.size(); ++c) {
      for (std::size_t i = 0; i < priors[c]; ++i) {
        rows.push_back({c == p ? 0.0 : 10.0 + double(c)});
        labels.push_back("k" + std::to_string(c));
      }
    }
    // 1-NN on a query at 0 returns the first row at distance 0, which belongs to class p.
    LearnerSpec s = LearnerSpec::knn();
    s.neighbors = 1;
    out.push_back(train(oracle::numeric_dataset(rows, labels), s));
  }
  return out;
}

}  // namespace

TEST_CASE("always-majority confusion matrix") {
  const MetricSet m = evaluate_confusion(matrix({{80, 0}, {20, 0}}));
  CHECK(m.accuracy == doctest::Approx(0.80).epsilon(1e-12));
  CHECK(m.kappa == 0.0);
  CHECK(m.weighted_mean_recall == doctest::Approx(0.50).epsilon(1e-12));
  CHECK(m.weighted_mean_precision == doctest::Approx(0.40).epsilon(1e-12));
}

TEST_CASE("perfect and partial agreement") {
  const MetricSet p = evaluate_confusion(matrix({{50, 0}, {0, 50}}));
  CHECK(p.accuracy == 1.0);
  CHECK(p.kappa == 1.0);
  CHECK(p.weighted_mean_recall == 1.0);
  CHECK(p.weighted_mean_precision == 1.0);
  const MetricSet q = evaluate_confusion(matrix({{40, 10}, {20, 30}}));
  CHECK(q.accuracy == doctest::Approx(0.70));
  CHECK(q.kappa == doctest::Approx(0.40));
  CHECK_THROWS_AS(evaluate_confusion(matrix({{0, 0}, {0, 0}})), DataError);
}

TEST_CASE("metrics match recomputation from prediction lists") {
  std::mt19937 gen(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 + gen() % 4;
    std::vector<std::vector<std::size_t>> counts(m, std::vector<std::size_t>(m));
    std::size_t total = 0;
    for (auto& row : counts) {
      for (auto& v : row) {
        v = gen() % 4 == 0 ? 0 : gen() % 30;
        total += v;
      }
    }
    if (total == 0) counts[0][0] = 1;
    const MetricSet got = evaluate_confusion(matrix(counts));
    const auto want = oracle::metrics_from_pairs(counts);
    CHECK(std::abs(got.accuracy - want.accuracy) <= 1e-12);
    CHECK(std::abs(got.kappa - want.kappa) <= 1e-12);
    CHECK(std::abs(got.weighted_mean_recall - want.recall) <= 1e-12);
    CHECK(std::abs(got.weighted_mean_precision - want.precision) <= 1e-12);
  }
}

TEST_CASE("accuracy and kappa are invariant under class relabelling") {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + gen() % 4;
    std::vector<std::vector<std::size_t>> counts(m, std::vector<std::size_t>(m));
    for (auto& row : counts) {
      for (auto& v : row) v = 1 + gen() % 20;
    }
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    auto permuted = counts;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) permuted[perm[i]][perm[j]] = counts[i][j];
    }
    const auto a = evaluate_confusion(matrix(counts));
    const auto b = evaluate_confusion(matrix(permuted));
    CHECK(a.accuracy == doctest::Approx(b.accuracy).epsilon(1e-12));
    CHECK(a.kappa == doctest::Approx(b.kappa).epsilon(1e-12));
  }
}

TEST_CASE("vote is the mode under the tie rules") {
  const std::vector<double> q = {0.0};
  CHECK(vote_predict(committee({0, 0, 1}, {5, 5}), q) == 0);
  CHECK(vote_predict(committee({1, 0, 1}, {5, 5}), q) == 1);
  CHECK(vote_predict(committee({0, 1}, {6, 4}), q) == 0);
  CHECK(vote_predict(committee({0, 1}, {4, 6}), q) == 1);
  CHECK(vote_predict(committee({1, 0}, {5, 5}), q) == 0);
  CHECK(vote_predict(committee({2}, {3, 3, 3}), q) == 2);

  std::mt19937 gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t classes = 2 + gen() % 3;
    std::vector<std::size_t> priors(classes);
    for (auto& p : priors) p = 2 + gen() % 5;
    std::vector<std::size_t> preds(1 + gen() % 6);
    for (auto& p : preds) p = gen() % classes;
    auto models = committee(preds, priors);
    std::vector<std::size_t> votes(classes, 0);
    for (auto p : preds) ++votes[p];
    std::size_t want = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (votes[c] > votes[want] || (votes[c] == votes[want] && priors[c] > priors[want])) want = c;
    }
    CHECK(vote_predict(models, q) == want);
    std::shuffle(models.begin(), models.end(), gen);
    CHECK(vote_predict(models, q) == want);
    CHECK(make_vote(models).predict(q) == want);
  }
  CHECK_THROWS_AS(vote_predict(std::vector<TrainedModel>{}, q), ConfigError);
  const auto a = committee({0}, {3, 3});
  const auto b = committee({0}, {3, 3, 3});
  const std::vector<TrainedModel> mixed = {a[0], b[0]};
  CHECK_THROWS_AS(vote_predict(mixed, q), ConfigError);
}

TEST_CASE("mean and sample standard deviation") {
  const std::vector<double> v = {1, 2, 3, 4};
  const MeanStd s = mean_std(v);
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(mean_std(std::vector<double>{7}).std == 0.0);
}

TEST_CASE("cross-validation on separable data") {
  const Dataset d = oracle::blobs(50, 2, 20.0, 4);
  LearnerSpec cart = LearnerSpec::cart();
  cart.min_leaf = 1;
  const LearnerSpec learners[] = {cart, LearnerSpec::knn()};
  const auto r = cross_validate(d, learners, 10, 3);
  CHECK(r.folds.size() == 10);
  CHECK(r.accuracy.mean == 1.0);
  CHECK(r.accuracy.std == 0.0);
  CHECK(r.pooled.total() == d.num_rows());

  for (std::size_t k = 0; k < r.folds.size(); ++k) CHECK(evaluate_confusion(r.fold_confusions[k]) == r.folds[k]);
  double mean = 0;
  for (const auto& f : r.folds) mean += f.kappa / 10.0;
  CHECK(std::abs(mean - r.kappa.mean) <= 1e-12);
}

TEST_CASE("a single learner equals its own cross-validation and results are reproducible") {
  const Dataset d = oracle::blobs(40, 3, 1.5, 8);
  const LearnerSpec one[] = {LearnerSpec::random_tree()};
  const auto a = cross_validate(d, one, 10, 21);
  const auto b = cross_validate(d, one, 10, 21);
  CHECK(a.accuracy.mean == b.accuracy.mean);
  CHECK(a.fold_confusions == b.fold_confusions);

  // Recompute fold by fold with the documented seed policy.
  const auto plan = stratified_folds(d, 10, 21);
  const TrainingData all = make_training_data(d);
  for (std::size_t k = 0; k < 10; ++k) {
    const auto train_rows = plan.training_indices(k);
    LearnerSpec s = one[0];
    s.seed = 21 + k;
    const auto m = train(d.select_rows(train_rows), s);
    ConfusionMatrix cm(d.class_labels());
    for (auto r : plan.folds[k]) cm.add(all.y[r], m.predict(all.x.row(r)));
    CHECK(cm == a.fold_confusions[k]);
  }
}

TEST_CASE("thread count does not change results") {
  const Dataset d = oracle::blobs(30, 3, 1.0, 2, 3);
  const LearnerSpec learners[] = {LearnerSpec::random_tree(), LearnerSpec::kstar(), LearnerSpec::knn()};
  CvOptions one;
  one.threads = 1;
  CvOptions four;
  four.threads = 4;
  CHECK(cross_validate(d, learners, 5, 7, one).fold_confusions == cross_validate(d, learners, 5, 7, four).fold_confusions);
}

TEST_CASE("random labels give kappa near zero") {
  std::mt19937 gen(77);
  std::normal_distribution<double> n(0, 1);
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::vector<std::string> base;
  for (int i = 0; i < 200; ++i) {
    rows.push_back({n(gen), n(gen), n(gen)});
    base.push_back(i < 100 ? "a" : "b");
  }
  std::shuffle(base.begin(), base.end(), gen);
  const LearnerSpec learners[] = {LearnerSpec::random_tree(), LearnerSpec::knn()};
  const auto r = cross_validate(oracle::numeric_dataset(rows, base), learners, 10, 5);
  CHECK(std::abs(r.kappa.mean) <= 0.15);
}

TEST_CASE("strict de-duplication drops test rows seen in training") {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (int i = 0; i < 60; ++i) {
    rows.push_back({double(i % 30)});
    labels.push_back(i % 2 ? "a" : "b");
  }
  const Dataset d = oracle::numeric_dataset(rows, labels);
  const LearnerSpec learners[] = {LearnerSpec::knn()};
  CvOptions strict;
  strict.strict_dedup = true;
  const auto plan = stratified_folds(d, 3, 1);
  std::size_t kept = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto train_rows = plan.training_indices(k);
    for (auto r : plan.folds[k]) {
      kept += std::none_of(train_rows.begin(), train_rows.end(), [&](auto t) { return d.at(t, 0) == d.at(r, 0); });
    }
  }
  const auto r = cross_validate(d, learners, 3, 1, strict);
  CHECK(r.pooled.total() == kept);
  CHECK(kept < d.num_rows());
  CHECK(cross_validate(d, learners, 3, 1).pooled.total() == d.num_rows());
}
