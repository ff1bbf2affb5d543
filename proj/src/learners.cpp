#include "rpm/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "model_impl.hpp"
#include "rpm/error.hpp"
#include "rpm/log.hpp"
#include "rpm/random.hpp"

namespace rpm {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::cart: return "cart";
    case Algorithm::random_tree: return "random_tree";
    case Algorithm::random_forest: return "random_forest";
    case Algorithm::knn: return "knn";
    case Algorithm::kstar: return "kstar";
    case Algorithm::vote: return "vote";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::cart, Algorithm::random_tree, Algorithm::random_forest, Algorithm::knn,
                 Algorithm::kstar, Algorithm::vote}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown learner '" + std::string(name) + "'");
}

LearnerSpec LearnerSpec::cart() { return LearnerSpec{}; }

LearnerSpec LearnerSpec::random_tree() {
  LearnerSpec s;
  s.algorithm = Algorithm::random_tree;
  s.min_leaf = 1;
  return s;
}

LearnerSpec LearnerSpec::random_forest() {
  LearnerSpec s;
  s.algorithm = Algorithm::random_forest;
  s.min_leaf = 1;
  return s;
}

LearnerSpec LearnerSpec::knn() {
  LearnerSpec s;
  s.algorithm = Algorithm::knn;
  return s;
}

LearnerSpec LearnerSpec::kstar() {
  LearnerSpec s;
  s.algorithm = Algorithm::kstar;
  return s;
}

void LearnerSpec::validate() const {
  switch (algorithm) {
    case Algorithm::cart:
    case Algorithm::random_tree:
      if (min_leaf == 0) throw ConfigError("min_leaf must be at least 1");
      break;
    case Algorithm::random_forest:
      if (min_leaf == 0) throw ConfigError("min_leaf must be at least 1");
      if (trees == 0) throw ConfigError("random forest needs at least one tree");
      break;
    case Algorithm::knn:
      if (neighbors == 0) throw ConfigError("knn needs at least one neighbor");
      break;
    case Algorithm::kstar:
      if (!(blend > 0.0 && blend <= 100.0)) throw ConfigError("kstar blend must lie in (0, 100]");
      break;
    case Algorithm::vote:
      throw ConfigError("vote is an ensemble, not a base learner");
  }
}

std::string LearnerSpec::describe() const {
  std::ostringstream out;
  out << to_string(algorithm);
  switch (algorithm) {
    case Algorithm::cart:
      out << "(min_leaf=" << min_leaf << ", max_depth=" << max_depth << ")";
      break;
    case Algorithm::random_tree:
      out << "(min_leaf=" << min_leaf << ", max_depth=" << max_depth << ", attributes_per_node=" << attributes_per_node
          << ")";
      break;
    case Algorithm::random_forest:
      out << "(trees=" << trees << ", min_leaf=" << min_leaf << ", attributes_per_node=" << attributes_per_node
          << ", bootstrap=" << (bootstrap ? "on" : "off") << ")";
      break;
    case Algorithm::knn:
      out << "(k=" << neighbors << ", weighting=" << (distance_weighting ? "1/d" : "none") << ")";
      break;
    case Algorithm::kstar:
      out << "(blend=" << blend << ")";
      break;
    case Algorithm::vote:
      break;
  }
  return out.str();
}

namespace detail {

ModelImpl::ModelImpl(Algorithm algo, const TrainingData& data)
    : algorithm(algo), labels(data.class_labels), counts(data.class_counts()), arity(data.cols()), guarded_(true) {
  nominal_.resize(arity);
  seen_.resize(arity);
  fallback_.assign(arity, 0.0);
  for (std::size_t a = 0; a < arity; ++a) {
    nominal_[a] = data.nominal(a);
    if (nominal_[a]) {
      std::vector<std::size_t> freq(data.attributes[a].categories.size(), 0);
      for (std::size_t r = 0; r < data.rows(); ++r) ++freq[static_cast<std::size_t>(data.x.at(r, a))];
      seen_[a].resize(freq.size());
      for (std::size_t c = 0; c < freq.size(); ++c) seen_[a][c] = freq[c] > 0;
      fallback_[a] = static_cast<double>(std::max_element(freq.begin(), freq.end()) - freq.begin());
    } else {
      double sum = 0.0;
      for (std::size_t r = 0; r < data.rows(); ++r) sum += data.x.at(r, a);
      fallback_[a] = data.rows() ? sum / static_cast<double>(data.rows()) : 0.0;
    }
  }
}

ModelImpl::ModelImpl(Algorithm algo, std::vector<std::string> l, std::vector<std::size_t> c, std::size_t n)
    : algorithm(algo), labels(std::move(l)), counts(std::move(c)), arity(n) {}

std::span<const double> ModelImpl::sanitize(std::span<const double> row, std::vector<double>& scratch) const {
  if (!guarded_) return row;
  bool clean = true;
  for (std::size_t a = 0; a < arity && clean; ++a) {
    const double v = row[a];
    if (is_missing(v)) {
      clean = false;
    } else if (nominal_[a]) {
      const auto c = static_cast<std::size_t>(v);
      clean = v >= 0 && c < seen_[a].size() && seen_[a][c];
    }
  }
  if (clean) return row;
  scratch.assign(row.begin(), row.end());
  for (std::size_t a = 0; a < arity; ++a) {
    const double v = scratch[a];
    bool replace = is_missing(v);
    if (!replace && nominal_[a]) {
      const auto c = static_cast<std::size_t>(v);
      replace = v < 0 || c >= seen_[a].size() || !seen_[a][c];
      if (replace && !warned_.exchange(true)) {
        log::warn("nominal category unseen in training; using the most frequent training category");
      }
    }
    if (replace) scratch[a] = fallback_[a];
  }
  return scratch;
}

}  // namespace detail

TrainedModel::TrainedModel(std::shared_ptr<const detail::ModelImpl> impl) : impl_(std::move(impl)) {}

Algorithm TrainedModel::algorithm() const { return impl_->algorithm; }

std::size_t TrainedModel::predict(std::span<const double> row) const {
  if (!impl_) throw ConfigError("predict called on an untrained model");
  if (row.size() != impl_->arity) {
    throw DataError("instance has " + std::to_string(row.size()) + " attributes, model expects " +
                    std::to_string(impl_->arity));
  }
  std::vector<double> scratch;
  return impl_->predict_clean(impl_->sanitize(row, scratch));
}

const std::string& TrainedModel::predict_label(std::span<const double> row) const {
  return impl_->labels[predict(row)];
}

const std::vector<std::string>& TrainedModel::class_labels() const { return impl_->labels; }
const std::vector<std::size_t>& TrainedModel::training_class_counts() const { return impl_->counts; }
std::size_t TrainedModel::arity() const { return impl_->arity; }
const Tree* TrainedModel::tree() const { return impl_->tree(); }
const std::vector<Tree>* TrainedModel::forest() const { return impl_->forest(); }

namespace {

std::vector<std::size_t> all_rows(const TrainingData& data) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

std::size_t default_attributes_per_node(std::size_t requested, std::size_t cols) {
  if (requested > 0) return std::min(requested, cols);
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cols))));
}

void require_rows(const TrainingData& data) {
  if (data.rows() == 0) throw DataError("cannot train on an empty dataset");
}

class TreeModel final : public detail::ModelImpl {
 public:
  TreeModel(Algorithm algo, const TrainingData& data, Tree tree) : ModelImpl(algo, data), tree_(std::move(tree)) {}
  std::size_t predict_clean(std::span<const double> row) const override { return tree_.predict(row); }
  const Tree* tree() const override { return &tree_; }

 private:
  Tree tree_;
};

class ForestModel final : public detail::ModelImpl {
 public:
  ForestModel(const TrainingData& data, std::vector<Tree> trees)
      : ModelImpl(Algorithm::random_forest, data), trees_(std::move(trees)) {}

  std::size_t predict_clean(std::span<const double> row) const override {
    std::vector<std::size_t> votes(labels.size(), 0);
    for (const auto& t : trees_) ++votes[t.predict(row)];
    return majority_class(votes, counts);
  }
  const std::vector<Tree>* forest() const override { return &trees_; }

 private:
  std::vector<Tree> trees_;
};

class KnnModel final : public detail::ModelImpl {
 public:
  KnnModel(const TrainingData& data, const LearnerSpec& spec)
      : ModelImpl(Algorithm::knn, data), x_(data.x), y_(data.y), k_(spec.neighbors), weighted_(spec.distance_weighting) {
    nominal_.resize(arity);
    scale_.assign(arity, 0.0);
    for (std::size_t a = 0; a < arity; ++a) {
      nominal_[a] = data.nominal(a);
      if (nominal_[a] || x_.rows == 0) continue;
      double lo = x_.at(0, a);
      double hi = lo;
      for (std::size_t r = 1; r < x_.rows; ++r) {
        lo = std::min(lo, x_.at(r, a));
        hi = std::max(hi, x_.at(r, a));
      }
      scale_[a] = hi > lo ? 1.0 / (hi - lo) : 0.0;
    }
  }

  std::size_t predict_clean(std::span<const double> row) const override {
    std::vector<std::pair<double, std::size_t>> dist(x_.rows);
    for (std::size_t r = 0; r < x_.rows; ++r) {
      const auto train = x_.row(r);
      double sum = 0.0;
      for (std::size_t a = 0; a < arity; ++a) {
        const double diff = nominal_[a] ? (train[a] != row[a] ? 1.0 : 0.0) : (train[a] - row[a]) * scale_[a];
        sum += diff * diff;
      }
      dist[r] = {sum, r};
    }
    // Lexicographic (distance, index) order puts lower training indices first on ties.
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_ - 1), dist.end());
    std::vector<double> score(labels.size(), 0.0);
    for (std::size_t i = 0; i < k_; ++i) {
      const double w = weighted_ ? 1.0 / std::max(std::sqrt(dist[i].first), 1e-12) : 1.0;
      score[y_[dist[i].second]] += w;
    }
    std::size_t best = labels.size();
    for (std::size_t c = 0; c < labels.size(); ++c) {
      if (counts[c] == 0) continue;
      if (best == labels.size() || score[c] > score[best] || (score[c] == score[best] && counts[c] > counts[best])) {
        best = c;
      }
    }
    return best;
  }

 private:
  NumericMatrix x_;
  std::vector<std::size_t> y_;
  std::size_t k_;
  bool weighted_;
  std::vector<bool> nominal_;
  std::vector<double> scale_;
};

// Entropic instance scorer. Each attribute contributes a transformation
// weight normalised to 1 for identical values: exp(-|a - x| / s) for numeric
// attributes, and 1 or r for a nominal match or mismatch. The scale s and
// mismatch weight r are set per attribute so that, averaged over probe values
// drawn from the training data, the total weight reaching the training set is
// blend% of its size.
class KStarModel final : public detail::ModelImpl {
 public:
  KStarModel(const TrainingData& data, const LearnerSpec& spec)
      : ModelImpl(Algorithm::kstar, data), x_(data.x), y_(data.y) {
    const double target = spec.blend / 100.0;
    nominal_.resize(arity);
    inv_scale_.assign(arity, 0.0);
    log_mismatch_.assign(arity, 0.0);
    for (std::size_t a = 0; a < arity; ++a) {
      nominal_[a] = data.nominal(a);
      const auto population = stride_sample(a, kPopulation);
      const auto probes = stride_sample(a, kProbes);
      if (nominal_[a]) {
        log_mismatch_[a] = std::log(calibrate_mismatch(population, probes, target));
      } else {
        inv_scale_[a] = calibrate_inverse_scale(population, probes, target);
      }
    }
  }

  std::size_t predict_clean(std::span<const double> row) const override {
    const std::size_t classes = labels.size();
    std::vector<double> logw(x_.rows);
    std::vector<double> peak(classes, -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < x_.rows; ++r) {
      const auto train = x_.row(r);
      double lw = 0.0;
      for (std::size_t a = 0; a < arity; ++a) {
        if (nominal_[a]) {
          if (train[a] != row[a]) lw += log_mismatch_[a];
        } else {
          lw -= std::abs(train[a] - row[a]) * inv_scale_[a];
        }
      }
      logw[r] = lw;
      peak[y_[r]] = std::max(peak[y_[r]], lw);
    }
    std::vector<double> sum(classes, 0.0);
    for (std::size_t r = 0; r < x_.rows; ++r) sum[y_[r]] += std::exp(logw[r] - peak[y_[r]]);

    std::size_t best = classes;
    double best_score = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      if (counts[c] == 0) continue;
      const double score = peak[c] + std::log(sum[c]);
      if (best == classes || score > best_score || (score == best_score && counts[c] > counts[best])) {
        best = c;
        best_score = score;
      }
    }
    return best;
  }

 private:
  static constexpr std::size_t kPopulation = 1000;
  static constexpr std::size_t kProbes = 100;

  std::vector<double> stride_sample(std::size_t a, std::size_t limit) const {
    const std::size_t n = x_.rows;
    const std::size_t take = std::min(n, limit);
    std::vector<double> out(take);
    for (std::size_t i = 0; i < take; ++i) out[i] = x_.at(i * n / take, a);
    return out;
  }

  static double mean_mass(const std::vector<double>& population, const std::vector<double>& probes, double inv_scale) {
    double total = 0.0;
    for (double q : probes) {
      double mass = 0.0;
      for (double p : population) mass += std::exp(-std::abs(p - q) * inv_scale);
      total += mass / static_cast<double>(population.size());
    }
    return total / static_cast<double>(probes.size());
  }

  static double calibrate_inverse_scale(const std::vector<double>& population, const std::vector<double>& probes,
                                        double target) {
    const auto [lo_it, hi_it] = std::minmax_element(population.begin(), population.end());
    const double range = *hi_it - *lo_it;
    if (!(range > 0.0)) return 0.0;  // constant attribute carries no information
    // Mass grows as the scale grows; bisect log(scale) over a wide bracket.
    double lo = std::log(range * 1e-9);
    double hi = std::log(range * 1e9);
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mean_mass(population, probes, std::exp(-mid)) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return std::exp(-0.5 * (lo + hi));
  }

  static double calibrate_mismatch(const std::vector<double>& population, const std::vector<double>& probes,
                                   double target) {
    double match = 0.0;
    for (double q : probes) {
      match += static_cast<double>(std::count(population.begin(), population.end(), q)) /
               static_cast<double>(population.size());
    }
    match /= static_cast<double>(probes.size());
    if (match >= 1.0) return 1.0;
    return std::clamp((target - match) / (1.0 - match), 1e-9, 1.0);
  }

  NumericMatrix x_;
  std::vector<std::size_t> y_;
  std::vector<bool> nominal_;
  std::vector<double> inv_scale_;
  std::vector<double> log_mismatch_;
};

}  // namespace

TrainedModel train_cart(const TrainingData& data, const LearnerSpec& spec) {
  spec.validate();
  require_rows(data);
  TreeGrowth growth{spec.min_leaf, spec.max_depth, 0};
  Rng rng(spec.seed);
  const auto rows = all_rows(data);
  return TrainedModel(std::make_shared<TreeModel>(Algorithm::cart, data, grow_tree(data, rows, growth, rng)));
}

TrainedModel train_random_tree(const TrainingData& data, const LearnerSpec& spec) {
  spec.validate();
  require_rows(data);
  TreeGrowth growth{spec.min_leaf, spec.max_depth, default_attributes_per_node(spec.attributes_per_node, data.cols())};
  Rng rng(spec.seed);
  const auto rows = all_rows(data);
  return TrainedModel(std::make_shared<TreeModel>(Algorithm::random_tree, data, grow_tree(data, rows, growth, rng)));
}

TrainedModel train_random_forest(const TrainingData& data, const LearnerSpec& spec) {
  spec.validate();
  require_rows(data);
  TreeGrowth growth{spec.min_leaf, spec.max_depth, default_attributes_per_node(spec.attributes_per_node, data.cols())};
  const std::size_t n = data.rows();
  std::vector<Tree> trees;
  trees.reserve(spec.trees);
  for (std::size_t t = 0; t < spec.trees; ++t) {
    Rng rng(derive_seed(spec.seed, t));
    std::vector<std::size_t> rows(n);
    if (spec.bootstrap) {
      for (auto& r : rows) r = uniform_below(rng, n);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    trees.push_back(grow_tree(data, rows, growth, rng));
  }
  return TrainedModel(std::make_shared<ForestModel>(data, std::move(trees)));
}

TrainedModel train_knn(const TrainingData& data, const LearnerSpec& spec) {
  spec.validate();
  require_rows(data);
  if (spec.neighbors > data.rows()) {
    throw ConfigError("knn k=" + std::to_string(spec.neighbors) + " exceeds the " + std::to_string(data.rows()) +
                      " training instances");
  }
  return TrainedModel(std::make_shared<KnnModel>(data, spec));
}

TrainedModel train_kstar(const TrainingData& data, const LearnerSpec& spec) {
  spec.validate();
  require_rows(data);
  return TrainedModel(std::make_shared<KStarModel>(data, spec));
}

TrainedModel train(const TrainingData& data, const LearnerSpec& spec) {
  switch (spec.algorithm) {
    case Algorithm::cart: return train_cart(data, spec);
    case Algorithm::random_tree: return train_random_tree(data, spec);
    case Algorithm::random_forest: return train_random_forest(data, spec);
    case Algorithm::knn: return train_knn(data, spec);
    case Algorithm::kstar: return train_kstar(data, spec);
    case Algorithm::vote: break;
  }
  throw ConfigError("vote is an ensemble, not a base learner");
}

TrainedModel train(const Dataset& d, const LearnerSpec& spec) { return train(make_training_data(d), spec); }

}  // namespace rpm
