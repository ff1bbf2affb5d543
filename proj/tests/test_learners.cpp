#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rpm/ensemble_eval.hpp"
#include "rpm/error.hpp"
#include "rpm/learners.hpp"

using namespace rpm;

namespace {

bool same_tree(const Tree& a, const Tree& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const auto& x = a.nodes[i];
    const auto& y = b.nodes[i];
    if (x.leaf != y.leaf || x.attribute != y.attribute || x.threshold != y.threshold || x.category != y.category ||
        x.left != y.left || x.right != y.right || x.prediction != y.prediction || x.class_counts != y.class_counts) {
      return false;
    }
  }
  return true;
}

double training_accuracy(const TrainedModel& m, const TrainingData& t) {
  std::size_t hit = 0;
  for (std::size_t r = 0; r < t.rows(); ++r) hit += m.predict(t.x.row(r)) == t.y[r];
  return double(hit) / double(t.rows());
}

// Distinct rows, labels a deterministic function of the row, mixed attribute kinds.
Dataset distinct_mixed(std::mt19937& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<AttributeMeta> attrs = {
      {"a", AttributeKind::numeric, {}, AttributeRole::regular},
      {"b", AttributeKind::nominal, {"p", "q", "r"}, AttributeRole::regular},
      {"c", AttributeKind::numeric, {}, AttributeRole::regular},
      {"y", AttributeKind::nominal, {"n", "y", "z"}, AttributeRole::target},
  };
  std::vector<double> cells;
  for (std::size_t r = 0; r < n; ++r) {
    const double a = double(r) + u(gen);  // strictly increasing, hence distinct
    const double b = double(gen() % 3);
    const double c = u(gen);
    cells.insert(cells.end(), {a, b, c, double(gen() % 3)});
  }
  return Dataset(attrs, cells);
}

}  // namespace

TEST_CASE("algorithm names round-trip") {
  for (auto a : {Algorithm::cart, Algorithm::random_tree, Algorithm::random_forest, Algorithm::knn, Algorithm::kstar}) {
    CHECK(parse_algorithm(to_string(a)) == a);
  }
  CHECK_THROWS_AS(parse_algorithm("lmt"), ConfigError);
}

TEST_CASE("spec validation") {
  LearnerSpec s = LearnerSpec::kstar();
  s.blend = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = LearnerSpec::random_forest();
  s.trees = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  const TrainingData t = make_training_data(oracle::blobs(3, 2, 5, 1));
  LearnerSpec k = LearnerSpec::knn();
  k.neighbors = 7;
  CHECK_THROWS_AS(train_knn(t, k), ConfigError);
  TrainingData empty = t;
  empty.x.rows = 0;
  empty.x.values.clear();
  empty.y.clear();
  CHECK_THROWS_AS(train_cart(empty), DataError);
}

TEST_CASE("cart on pure data is a single leaf") {
  const Dataset d = oracle::numeric_dataset({{1, 2}, {3, 4}, {5, 6}}, {"a", "a", "a"});
  const auto m = train(d, LearnerSpec::cart());
  REQUIRE(m.tree());
  CHECK(m.tree()->leaf_count() == 1);
  CHECK(m.predict_label(std::vector<double>{100, -3}) == "a");
}

TEST_CASE("cart root split on a 1-D example") {
  const Dataset d = oracle::numeric_dataset({{1}, {2}, {3}, {4}}, {"a", "a", "b", "b"});
  const TrainingData t = make_training_data(d);
  const auto m = train_cart(t);
  const auto& root = m.tree()->nodes[0];
  CHECK_FALSE(root.leaf);
  CHECK(root.threshold == 2.5);
  CHECK(training_accuracy(m, t) == 1.0);
}

TEST_CASE("cart fits XOR at depth two") {
  const Dataset d = oracle::numeric_dataset({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {"f", "t", "t", "f"});
  LearnerSpec s = LearnerSpec::cart();
  s.max_depth = 2;
  s.min_leaf = 1;
  const TrainingData t = make_training_data(d);
  const auto m = train_cart(t, s);
  CHECK(training_accuracy(m, t) == 1.0);
  CHECK(m.tree()->depth() <= 2);
}

TEST_CASE("cart split choice equals exhaustive search") {
  std::mt19937 gen(31);
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t p = 1 + gen() % 6;
    const std::size_t n = 4 + gen() % 47;
    const std::size_t classes = 2 + gen() % 3;
    const std::size_t min_leaf = 1 + gen() % 3;
    std::vector<AttributeMeta> attrs;
    std::vector<bool> nominal;
    for (std::size_t a = 0; a < p; ++a) {
      const bool nom = gen() % 3 == 0;
      nominal.push_back(nom);
      attrs.push_back({"a" + std::to_string(a), nom ? AttributeKind::nominal : AttributeKind::numeric,
                       nom ? std::vector<std::string>{"u", "v", "w", "z"} : std::vector<std::string>{},
                       AttributeRole::regular});
    }
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < classes; ++c) labels.push_back("c" + std::to_string(c));
    attrs.push_back({"y", AttributeKind::nominal, labels, AttributeRole::target});
    std::vector<std::vector<double>> x(n, std::vector<double>(p));
    std::vector<std::size_t> y(n);
    std::vector<double> cells;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t a = 0; a < p; ++a) {
        x[r][a] = nominal[a] ? double(gen() % 4) : double(gen() % 12) / 4.0;
        cells.push_back(x[r][a]);
      }
      y[r] = gen() % classes;
      cells.push_back(double(y[r]));
    }
    const TrainingData t = make_training_data(Dataset(attrs, cells));
    std::vector<std::size_t> rows(n), order(p);
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(order.begin(), order.end(), 0);
    const SplitChoice got = best_split(t, rows, order, min_leaf);
    const auto want = oracle::exhaustive_split(x, y, nominal, classes, min_leaf);
    REQUIRE(got.valid == want.found);
    if (!want.found) continue;
    ++compared;
    CHECK(got.gain == doctest::Approx(want.gain).epsilon(1e-12));
    const double key = got.nominal ? double(got.category) : got.threshold;
    const bool among = std::any_of(want.winners.begin(), want.winners.end(), [&](const auto& w) {
      return w.first == got.attribute && std::abs(w.second - key) < 1e-12;
    });
    CHECK(among);
  }
  CHECK(compared > 200);
}

TEST_CASE("unconstrained learners fit distinct, consistently labelled data") {
  std::mt19937 gen(41);
  for (int trial = 0; trial < 5; ++trial) {
    const TrainingData t = make_training_data(distinct_mixed(gen, 60));
    LearnerSpec cart = LearnerSpec::cart();
    cart.min_leaf = 1;
    CHECK(training_accuracy(train_cart(t, cart), t) == 1.0);
    CHECK(training_accuracy(train_random_tree(t, LearnerSpec::random_tree()), t) == 1.0);
    LearnerSpec knn = LearnerSpec::knn();
    knn.neighbors = 1;
    CHECK(training_accuracy(train_knn(t, knn), t) == 1.0);
    LearnerSpec ks = LearnerSpec::kstar();
    ks.blend = 1;
    CHECK(training_accuracy(train_kstar(t, ks), t) == 1.0);
    CHECK(training_accuracy(train_random_forest(t, LearnerSpec::random_forest()), t) >= 0.95);
  }
}

TEST_CASE("random tree degeneracies and determinism") {
  std::mt19937 gen(43);
  const TrainingData t = make_training_data(distinct_mixed(gen, 80));
  LearnerSpec rt = LearnerSpec::random_tree();
  rt.attributes_per_node = t.cols();
  rt.seed = 5;
  LearnerSpec cart = LearnerSpec::cart();
  cart.min_leaf = rt.min_leaf;
  CHECK(same_tree(*train_random_tree(t, rt).tree(), *train_cart(t, cart).tree()));

  rt.attributes_per_node = 0;
  CHECK(same_tree(*train_random_tree(t, rt).tree(), *train_random_tree(t, rt).tree()));

  LearnerSpec rf = LearnerSpec::random_forest();
  rf.trees = 1;
  rf.bootstrap = false;
  rf.seed = 9;
  const auto forest = train_random_forest(t, rf);
  LearnerSpec one = LearnerSpec::random_tree();
  one.seed = derive_seed(9, 0);
  REQUIRE(forest.forest()->size() == 1);
  CHECK(same_tree(forest.forest()->front(), *train_random_tree(t, one).tree()));

  const Dataset pure = oracle::numeric_dataset({{1}, {2}, {3}}, {"q", "q", "q"});
  CHECK(train(pure, LearnerSpec::random_tree()).tree()->leaf_count() == 1);
  const auto pf = train(pure, LearnerSpec::random_forest());
  for (const auto& tree : *pf.forest()) CHECK(tree.leaf_count() == 1);
  CHECK(pf.predict_label(std::vector<double>{8}) == "q");
}

TEST_CASE("random forest separates well-spaced blobs") {
  const Dataset d = oracle::blobs(100, 2, 6.0, 3);
  const LearnerSpec rf[] = {LearnerSpec::random_forest()};
  CHECK(cross_validate(d, rf, 10, 1).accuracy.mean >= 0.95);
}

TEST_CASE("knn behaviour") {
  const Dataset d = oracle::numeric_dataset({{0, 0}, {0, 1}, {1, 0}, {100, 100}, {100, 101}, {101, 100}},
                                            {"lo", "lo", "lo", "hi", "hi", "hi"});
  LearnerSpec k1 = LearnerSpec::knn();
  k1.neighbors = 1;
  const auto m1 = train(d, k1);
  CHECK(m1.predict_label(std::vector<double>{100, 101}) == "hi");

  LearnerSpec k3 = LearnerSpec::knn();
  k3.neighbors = 3;
  const TrainingData t = make_training_data(d);
  const auto m3 = train_knn(t, k3);
  std::mt19937 gen(2);
  std::normal_distribution<double> jitter(0, 2);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> q = {(i % 2 ? 100.0 : 0.0) + jitter(gen), (i % 2 ? 100.0 : 0.0) + jitter(gen)};
    // Brute-force scan for the three nearest training rows.
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double dx = (t.x.at(r, 0) - q[0]) / 101.0, dy = (t.x.at(r, 1) - q[1]) / 101.0;
      dist.emplace_back(dx * dx + dy * dy, r);
    }
    std::sort(dist.begin(), dist.end());
    std::vector<int> votes(2, 0);
    for (int j = 0; j < 3; ++j) ++votes[t.y[dist[j].second]];
    CHECK(m3.predict(q) == (votes[0] > votes[1] ? 0u : 1u));
  }

  // k = n on balanced data: votes tie, equal priors, so the first class wins.
  LearnerSpec all = LearnerSpec::knn();
  all.neighbors = 6;
  CHECK(train(d, all).predict_label(std::vector<double>{100, 100}) == "hi");
  const Dataset skew = oracle::numeric_dataset({{0}, {1}, {2}, {3}, {4}}, {"b", "b", "b", "a", "a"});
  LearnerSpec k4 = LearnerSpec::knn();
  k4.neighbors = 4;
  // Nearest four to 3.4 are 3, 4, 2, 1: two votes each, class b has the larger prior.
  CHECK(train(skew, k4).predict_label(std::vector<double>{3.4}) == "b");
}

TEST_CASE("knn distance ties go to the lower training index") {
  const Dataset d = oracle::numeric_dataset({{-1}, {1}, {5}}, {"l", "r", "r"});
  LearnerSpec k1 = LearnerSpec::knn();
  k1.neighbors = 1;
  CHECK(train(d, k1).predict_label(std::vector<double>{0}) == "l");
}

TEST_CASE("kstar behaviour") {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::mt19937 gen(12);
  std::normal_distribution<double> noise(0, 0.5);
  for (int i = 0; i < 20; ++i) {
    rows.push_back({noise(gen)});
    labels.push_back("near0");
    rows.push_back({10 + noise(gen)});
    labels.push_back("near10");
  }
  const Dataset d = oracle::numeric_dataset(rows, labels);
  const auto m = train(d, LearnerSpec::kstar());
  CHECK(m.predict_label(std::vector<double>{1.0}) == "near0");
  CHECK(m.predict_label(std::vector<double>{8.5}) == "near10");

  LearnerSpec small = LearnerSpec::kstar();
  small.blend = 0.5;
  const auto ms = train(d, small);
  for (std::size_t r = 0; r < d.num_rows(); ++r) CHECK(ms.predict(std::vector<double>{d.at(r, 0)}) == d.class_of(r));

  const Dataset single = oracle::numeric_dataset({{1}, {2}, {3}}, {"only", "only", "only"});
  CHECK(train(single, LearnerSpec::kstar()).predict_label(std::vector<double>{-50}) == "only");
}

TEST_CASE("predict contract") {
  std::mt19937 gen(7);
  const Dataset d = distinct_mixed(gen, 40);
  const TrainingData t = make_training_data(d);
  for (const auto& spec : {LearnerSpec::cart(), LearnerSpec::random_tree(), LearnerSpec::random_forest(),
                           LearnerSpec::knn(), LearnerSpec::kstar()}) {
    const auto m = train(t, spec);
    CHECK(m.arity() == 3);
    CHECK_THROWS_AS(m.predict(std::vector<double>{1, 0}), DataError);
    // Repeated predictions are identical, and an unseen category still yields a training label.
    for (std::size_t r = 0; r < t.rows(); ++r) CHECK(m.predict(t.x.row(r)) == m.predict(t.x.row(r)));
    const std::size_t out = m.predict(std::vector<double>{3.0, 17.0, 0.5});
    CHECK(out < t.num_classes());
    CHECK(train(t, spec).predict(t.x.row(5)) == m.predict(t.x.row(5)));
  }
}
