#include "rpm/ensemble_eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "model_impl.hpp"
#include "rpm/error.hpp"

namespace rpm {

namespace {

void check_members(std::span<const TrainedModel> models) {
  if (models.empty()) throw ConfigError("vote needs at least one model");
  for (const auto& m : models) {
    if (!m) throw ConfigError("vote member is untrained");
    if (m.class_labels() != models.front().class_labels() ||
        m.training_class_counts() != models.front().training_class_counts()) {
      throw ConfigError("vote members were trained on different label sets");
    }
  }
}

class VoteModel final : public detail::ModelImpl {
 public:
  explicit VoteModel(std::vector<TrainedModel> members)
      : ModelImpl(Algorithm::vote, members.front().class_labels(), members.front().training_class_counts(),
                  members.front().arity()),
        members_(std::move(members)) {}

  std::size_t predict_clean(std::span<const double> row) const override { return vote_predict(members_, row); }

 private:
  std::vector<TrainedModel> members_;
};

}  // namespace

TrainedModel make_vote(std::vector<TrainedModel> members) {
  check_members(members);
  return TrainedModel(std::make_shared<VoteModel>(std::move(members)));
}

std::size_t vote_predict(std::span<const TrainedModel> models, std::span<const double> row) {
  check_members(models);
  const auto& priors = models.front().training_class_counts();
  std::vector<std::size_t> votes(priors.size(), 0);
  for (const auto& m : models) ++votes[m.predict(row)];
  return majority_class(votes, priors);
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_labels)
    : labels(std::move(class_labels)), counts(labels.size(), std::vector<std::size_t>(labels.size(), 0)) {}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.labels != labels) throw DataError("cannot add confusion matrices over different labels");
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < size(); ++j) counts[i][j] += other.counts[i][j];
  }
  return *this;
}

MetricSet evaluate_confusion(const ConfusionMatrix& cm) {
  const std::size_t m = cm.counts.size();
  const double total = static_cast<double>(cm.total());
  if (m == 0 || total == 0.0) throw DataError("confusion matrix is empty");

  std::vector<double> row_sum(m, 0.0);
  std::vector<double> col_sum(m, 0.0);
  double trace = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = static_cast<double>(cm.counts[i][j]);
      row_sum[i] += v;
      col_sum[j] += v;
    }
    trace += static_cast<double>(cm.counts[i][i]);
  }

  MetricSet out;
  out.accuracy = trace / total;
  double chance = 0.0;
  for (std::size_t k = 0; k < m; ++k) chance += row_sum[k] * col_sum[k];
  chance /= total * total;
  out.kappa = chance == 1.0 ? 0.0 : (out.accuracy - chance) / (1.0 - chance);

  double recall = 0.0;
  double precision = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double hit = static_cast<double>(cm.counts[k][k]);
    if (row_sum[k] > 0.0) recall += hit / row_sum[k];
    if (col_sum[k] > 0.0) precision += hit / col_sum[k];
  }
  out.weighted_mean_recall = recall / static_cast<double>(m);
  out.weighted_mean_precision = precision / static_cast<double>(m);
  return out;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

void aggregate(EvaluationReport& report) {
  auto collect = [&](double MetricSet::*field) {
    std::vector<double> v;
    v.reserve(report.folds.size());
    for (const auto& f : report.folds) v.push_back(f.*field);
    return mean_std(v);
  };
  report.accuracy = collect(&MetricSet::accuracy);
  report.kappa = collect(&MetricSet::kappa);
  report.weighted_mean_recall = collect(&MetricSet::weighted_mean_recall);
  report.weighted_mean_precision = collect(&MetricSet::weighted_mean_precision);
}

namespace {

struct RowKey {
  std::vector<double> cells;
  bool operator<(const RowKey& o) const {
    return std::memcmp(cells.data(), o.cells.data(), cells.size() * sizeof(double)) < 0;
  }
};

ConfusionMatrix run_fold(const Dataset& d, const TrainingData& all, const FoldPlan& plan, std::size_t k,
                         std::span<const LearnerSpec> learners, std::uint64_t seed, const CvOptions& options) {
  const auto train_rows = plan.training_indices(k);
  std::vector<std::size_t> test_rows = plan.folds[k];
  if (options.strict_dedup) {
    std::set<RowKey> seen;
    for (auto r : train_rows) seen.insert(RowKey{{d.row(r).begin(), d.row(r).end()}});
    std::erase_if(test_rows, [&](std::size_t r) { return seen.count(RowKey{{d.row(r).begin(), d.row(r).end()}}) > 0; });
    if (test_rows.empty()) {
      throw DataError("fold " + std::to_string(k) + " has no test instances left after de-duplication");
    }
  }

  TrainingData fold_train;
  fold_train.attributes = all.attributes;
  fold_train.class_labels = all.class_labels;
  fold_train.x.names = all.x.names;
  fold_train.x.cols = all.x.cols;
  fold_train.x.rows = train_rows.size();
  fold_train.x.values.reserve(train_rows.size() * all.x.cols);
  for (auto r : train_rows) {
    const auto src = all.x.row(r);
    fold_train.x.values.insert(fold_train.x.values.end(), src.begin(), src.end());
    fold_train.y.push_back(all.y[r]);
  }

  std::vector<TrainedModel> members;
  for (auto spec : learners) {
    spec.seed = seed + k;
    members.push_back(train(fold_train, spec));
  }
  ConfusionMatrix cm(all.class_labels);
  for (auto r : test_rows) cm.add(all.y[r], vote_predict(members, all.x.row(r)));
  return cm;
}

}  // namespace

EvaluationReport cross_validate(const Dataset& d, std::span<const LearnerSpec> learners, std::size_t folds,
                                std::uint64_t seed, const CvOptions& options) {
  if (learners.empty()) throw ConfigError("cross-validation needs at least one learner");
  if (folds < 2) throw ConfigError("cross-validation needs at least two folds");
  for (const auto& l : learners) l.validate();

  const FoldPlan plan = stratified_folds(d, folds, seed);
  const TrainingData all = make_training_data(d);

  EvaluationReport report;
  report.fold_count = folds;
  report.seed = seed;
  report.learners.assign(learners.begin(), learners.end());
  report.instances = d.num_rows();
  report.attributes = d.num_regular();
  report.fold_confusions.resize(folds);

  std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, folds);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < folds; k = next++) {
      try {
        report.fold_confusions[k] = run_fold(d, all, plan, k, learners, seed, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  report.pooled = ConfusionMatrix(d.class_labels());
  for (const auto& cm : report.fold_confusions) {
    report.folds.push_back(evaluate_confusion(cm));
    report.pooled += cm;
  }
  aggregate(report);
  return report;
}

}  // namespace rpm
