#include "rpm/attribute_clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rpm/error.hpp"
#include "rpm/log.hpp"
#include "rpm/random.hpp"

namespace rpm {

namespace {

using Point = std::vector<double>;

double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t nearest(const Point& p, const std::vector<Point>& centroids) {
  std::size_t best = 0;
  double best_d = sq_dist(p, centroids[0]);
  for (std::size_t j = 1; j < centroids.size(); ++j) {
    const double d = sq_dist(p, centroids[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

std::vector<Point> plus_plus_seeds(const std::vector<Point>& rows, std::size_t k, Rng& rng) {
  const std::size_t n = rows.size();
  std::vector<Point> seeds;
  std::vector<bool> chosen(n, false);
  std::size_t first = uniform_below(rng, n);
  seeds.push_back(rows[first]);
  chosen[first] = true;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(rows[i], seeds[0]);
  while (seeds.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += chosen[i] ? 0.0 : d2[i];
    std::size_t pick = n;
    if (total > 0.0) {
      const double u = uniform_unit(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || d2[i] == 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > u) break;
      }
    } else {
      // Every remaining row coincides with a seed; take a uniformly random unchosen one.
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) rest.push_back(i);
      }
      pick = rest[uniform_below(rng, rest.size())];
    }
    chosen[pick] = true;
    seeds.push_back(rows[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(rows[i], seeds.back()));
  }
  return seeds;
}

std::vector<Point> means(const std::vector<Point>& rows, const std::vector<std::size_t>& labels, std::size_t k,
                         const std::vector<Point>& previous) {
  const std::size_t dim = rows.front().size();
  std::vector<Point> out(k, Point(dim, 0.0));
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& c = out[labels[i]];
    for (std::size_t d = 0; d < dim; ++d) c[d] += rows[i][d];
    ++count[labels[i]];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (count[j] == 0) {
      out[j] = previous[j];
      continue;
    }
    for (double& v : out[j]) v /= static_cast<double>(count[j]);
  }
  return out;
}

void reseed_empty(const std::vector<Point>& rows, std::vector<std::size_t>& labels, const std::vector<Point>& centroids) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> count(k, 0);
  for (auto l : labels) ++count[l];
  for (std::size_t j = 0; j < k; ++j) {
    if (count[j] > 0) continue;
    std::size_t far = rows.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (count[labels[i]] < 2) continue;
      const double d = sq_dist(rows[i], centroids[labels[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == rows.size()) return;
    --count[labels[far]];
    labels[far] = j;
    count[j] = 1;
  }
}

// One Hartigan pass: moves single points to another cluster whenever that
// lowers the total cost once both centroids are updated. Lloyd fixed points
// are often not stable under such moves. Returns whether anything moved.
bool hartigan_pass(const std::vector<Point>& rows, std::vector<std::size_t>& labels, std::vector<Point>& centroids) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> count(k, 0);
  for (auto l : labels) ++count[l];
  bool moved = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t a = labels[i];
    if (count[a] < 2) continue;
    const double na = static_cast<double>(count[a]);
    const double removal = na / (na - 1.0) * sq_dist(rows[i], centroids[a]);
    std::size_t target = a;
    double best = removal;
    for (std::size_t b = 0; b < k; ++b) {
      if (b == a) continue;
      const double nb = static_cast<double>(count[b]);
      const double addition = nb / (nb + 1.0) * sq_dist(rows[i], centroids[b]);
      if (addition < best - 1e-12 * std::max(1.0, removal)) {
        best = addition;
        target = b;
      }
    }
    if (target == a) continue;
    const double nb = static_cast<double>(count[target]);
    for (std::size_t d = 0; d < rows[i].size(); ++d) {
      centroids[a][d] = (centroids[a][d] * na - rows[i][d]) / (na - 1.0);
      centroids[target][d] = (centroids[target][d] * nb + rows[i][d]) / (nb + 1.0);
    }
    --count[a];
    ++count[target];
    labels[i] = target;
    moved = true;
  }
  return moved;
}

ClusterAssignment lloyd(const std::vector<Point>& rows, const KMeansOptions& options, Rng& rng) {
  ClusterAssignment out;
  out.k = options.k;
  auto centroids = plus_plus_seeds(rows, options.k, rng);
  std::vector<std::size_t> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = nearest(rows[i], centroids);

  for (std::size_t iter = 1;; ++iter) {
    reseed_empty(rows, labels, centroids);
    auto updated = means(rows, labels, options.k, centroids);
    double shift = 0.0;
    for (std::size_t j = 0; j < options.k; ++j) shift = std::max(shift, std::sqrt(sq_dist(updated[j], centroids[j])));
    centroids = std::move(updated);
    double cost = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) cost += sq_dist(rows[i], centroids[labels[i]]);
    out.wcss_history.push_back(cost);
    out.iterations = iter;
    if (shift < options.tol || iter >= options.max_iter) break;

    std::vector<std::size_t> next(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) next[i] = nearest(rows[i], centroids);
    if (next == labels) break;
    labels = std::move(next);
  }
  // Polish the Lloyd fixed point with single-point moves.
  while (out.iterations < options.max_iter && hartigan_pass(rows, labels, centroids)) {
    centroids = means(rows, labels, options.k, centroids);
    double cost = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) cost += sq_dist(rows[i], centroids[labels[i]]);
    out.wcss_history.push_back(cost);
    ++out.iterations;
  }
  out.labels = std::move(labels);
  out.centroids = std::move(centroids);
  out.wcss = out.wcss_history.back();
  return out;
}

}  // namespace

std::vector<std::size_t> ClusterAssignment::sizes() const {
  std::vector<std::size_t> out(k, 0);
  for (auto l : labels) ++out[l];
  return out;
}

double wcss(const AttributeMatrix& m, const std::vector<std::size_t>& labels, const std::vector<std::vector<double>>& centroids) {
  double cost = 0.0;
  for (std::size_t i = 0; i < m.rows.size(); ++i) cost += sq_dist(m.rows[i], centroids[labels[i]]);
  return cost;
}

ClusterAssignment kmeans(const AttributeMatrix& m, const KMeansOptions& options) {
  if (m.rows.empty() || m.row_length() == 0) throw DataError("k-means needs a non-empty matrix");
  if (options.k == 0) throw ConfigError("k-means needs k >= 1");
  if (options.k > m.rows.size()) {
    throw ConfigError("k-means k=" + std::to_string(options.k) + " exceeds the " + std::to_string(m.rows.size()) +
                      " rows");
  }
  if (options.max_iter == 0) throw ConfigError("k-means needs max_iter >= 1");
  if (!(options.tol >= 0.0)) throw ConfigError("k-means tolerance must be non-negative");
  for (const auto& r : m.rows) {
    if (r.size() != m.row_length()) throw DataError("k-means rows differ in length");
  }

  ClusterAssignment best;
  const std::size_t runs = std::max<std::size_t>(1, options.restarts);
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng(runs == 1 ? options.seed : derive_seed(options.seed, r));
    auto result = lloyd(m.rows, options, rng);
    if (r == 0 || result.wcss < best.wcss) best = std::move(result);
  }
  return best;
}

std::vector<ClusterDataset> split_by_cluster(const Dataset& d, const ClusterAssignment& a) {
  const auto names = d.regular_names();
  if (a.labels.size() != names.size()) {
    throw DataError("cluster labels cover " + std::to_string(a.labels.size()) + " attributes, dataset has " +
                    std::to_string(names.size()));
  }
  std::vector<std::vector<std::string>> members(a.k);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (a.labels[i] >= a.k) throw DataError("cluster label out of range");
    members[a.labels[i]].push_back(names[i]);
  }
  std::vector<ClusterDataset> out;
  for (std::size_t c = 0; c < a.k; ++c) {
    if (members[c].empty()) {
      log::info("cluster " + std::to_string(c) + " is empty and was dropped");
      continue;
    }
    Dataset projected = project_attributes(d, members[c]);
    out.push_back({c, members[c], projected.with_provenance(d.provenance() + " cluster " + std::to_string(c))});
  }
  return out;
}

std::size_t choose_cluster(const std::vector<ClusterScore>& scores) {
  if (scores.empty()) throw ConfigError("no clusters to choose from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const auto& s = scores[i];
    const auto& b = scores[best];
    if (s.accuracy.mean > b.accuracy.mean ||
        (s.accuracy.mean == b.accuracy.mean &&
         (s.attributes.size() > b.attributes.size() ||
          (s.attributes.size() == b.attributes.size() && s.cluster < b.cluster)))) {
      best = i;
    }
  }
  return best;
}

ClusterChoice pick_best_cluster(const std::vector<ClusterDataset>& clusters, std::uint64_t seed,
                                const ClusterScoring& scoring) {
  if (clusters.empty()) throw ConfigError("no clusters to score");
  ClusterChoice choice;
  const LearnerSpec learners[] = {scoring.learner};
  for (const auto& c : clusters) {
    const auto report = cross_validate(c.data, learners, scoring.folds, seed, scoring.cv);
    choice.scores.push_back({c.cluster, c.attributes, report.accuracy});
  }
  choice.index = choose_cluster(choice.scores);
  return choice;
}

}  // namespace rpm
