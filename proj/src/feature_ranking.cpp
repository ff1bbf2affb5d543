#include "rpm/feature_ranking.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "rpm/error.hpp"

namespace rpm {

std::vector<double> equal_frequency_cuts(std::vector<double> values, std::size_t bins) {
  if (bins == 0) throw ConfigError("discretisation needs at least one bin");
  std::sort(values.begin(), values.end());
  std::vector<double> cuts;
  const std::size_t n = values.size();
  for (std::size_t j = 1; j < bins && n > 0; ++j) {
    const double cut = values[std::min(n - 1, j * n / bins)];
    if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
  }
  // A boundary equal to the minimum would leave the first bin empty.
  if (!cuts.empty() && n > 0 && cuts.front() <= values.front()) cuts.erase(cuts.begin());
  return cuts;
}

double chi_square_statistic(const std::vector<std::vector<double>>& table) {
  if (table.empty()) return 0.0;
  const std::size_t rows = table.size();
  const std::size_t cols = table.front().size();
  std::vector<double> row_sum(rows, 0.0);
  std::vector<double> col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      row_sum[i] += table[i][j];
      col_sum[j] += table[i][j];
      total += table[i][j];
    }
  }
  if (total == 0.0) return 0.0;
  double chi = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double expected = row_sum[i] * col_sum[j] / total;
      if (expected == 0.0) continue;
      const double diff = table[i][j] - expected;
      chi += diff * diff / expected;
    }
  }
  return chi;
}

AttributeWeights chi_square_weights(const Dataset& d, std::size_t bins) {
  if (bins == 0) throw ConfigError("discretisation needs at least one bin");
  if (d.has_missing()) throw DataError("chi-square weighting needs a dataset without missing cells");
  const auto present = d.class_counts();
  if (std::count_if(present.begin(), present.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw DataError("chi-square weighting needs at least two classes present");
  }
  const std::size_t classes = d.num_classes();
  AttributeWeights out;
  out.bins = bins;
  for (auto col : d.regular_indices()) {
    const auto& a = d.attribute(col);
    std::vector<double> values(d.num_rows());
    for (std::size_t r = 0; r < d.num_rows(); ++r) values[r] = d.at(r, col);

    std::vector<std::size_t> level(d.num_rows());
    std::size_t levels = 0;
    if (a.is_nominal()) {
      levels = a.categories.size();
      for (std::size_t r = 0; r < values.size(); ++r) level[r] = static_cast<std::size_t>(values[r]);
    } else {
      const auto cuts = equal_frequency_cuts(values, bins);
      levels = cuts.size() + 1;
      for (std::size_t r = 0; r < values.size(); ++r) {
        level[r] = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), values[r]) - cuts.begin());
      }
    }
    std::vector<std::vector<double>> table(levels, std::vector<double>(classes, 0.0));
    for (std::size_t r = 0; r < values.size(); ++r) table[level[r]][d.class_of(r)] += 1.0;
    out.weights.push_back({a.name, chi_square_statistic(table)});
  }
  return out;
}

std::vector<std::string> top_v_names(const AttributeWeights& w, std::size_t v) {
  if (v == 0) throw ConfigError("top-v selection needs v >= 1");
  std::vector<std::size_t> order(w.weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w.weights[a].chi_square > w.weights[b].chi_square; });
  order.resize(std::min(v, order.size()));
  std::sort(order.begin(), order.end());
  std::vector<std::string> names;
  for (auto i : order) names.push_back(w.weights[i].name);
  return names;
}

Dataset select_top_v(const Dataset& d, const AttributeWeights& w, std::size_t v) {
  const auto names = top_v_names(w, v);
  return project_attributes(d, names).with_provenance(d.provenance() + " top " + std::to_string(names.size()));
}

std::vector<double> PcaModel::transform(std::span<const double> row) const {
  std::vector<double> scores(retained, 0.0);
  for (std::size_t c = 0; c < retained; ++c) {
    double s = 0.0;
    for (std::size_t a = 0; a < means.size(); ++a) s += (row[a] - means[a]) / scales[a] * components[c][a];
    scores[c] = s;
  }
  return scores;
}

std::vector<double> PcaModel::inverse_transform(std::span<const double> scores) const {
  std::vector<double> out(means.size(), 0.0);
  for (std::size_t c = 0; c < scores.size(); ++c) {
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += scores[c] * components[c][a];
  }
  return out;
}

PcaModel fit_pca(const Dataset& d, const PcaOptions& options) {
  if (!(options.variance_to_keep > 0.0 && options.variance_to_keep <= 1.0)) {
    throw ConfigError("PCA variance_to_keep must lie in (0, 1]");
  }
  if (d.num_rows() < 2) throw DataError("PCA needs at least two instances");
  const NumericMatrix x = encode_numeric(d);
  const auto n = static_cast<Eigen::Index>(x.rows);
  const auto p = static_cast<Eigen::Index>(x.cols);
  if (p == 0) throw DataError("PCA needs at least one regular attribute");

  Eigen::MatrixXd z(n, p);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < p; ++c) z(r, c) = x.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  }
  PcaModel model;
  model.input_names = x.names;
  const Eigen::RowVectorXd mean = z.colwise().mean();
  z.rowwise() -= mean;
  bool any_variance = false;
  for (Eigen::Index c = 0; c < p; ++c) {
    const double sd = std::sqrt(z.col(c).squaredNorm() / static_cast<double>(n - 1));
    const bool varies = sd > 1e-12 * std::max(1.0, std::abs(mean(c)));
    any_variance = any_variance || varies;
    const double scale = options.standardize && varies ? sd : 1.0;
    z.col(c) /= scale;
    model.means.push_back(mean(c));
    model.scales.push_back(scale);
  }
  if (!any_variance) throw DataError("PCA input has zero variance");

  const Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("PCA eigen-decomposition failed");
  const Eigen::VectorXd values = solver.eigenvalues();   // ascending
  const Eigen::MatrixXd vectors = solver.eigenvectors();

  double total = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) total += std::max(0.0, values(i));
  double cumulative = 0.0;
  for (Eigen::Index i = p - 1; i >= 0; --i) {
    const double lambda = std::max(0.0, values(i));
    Eigen::VectorXd v = vectors.col(i);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v(pivot) < 0) v = -v;
    model.eigenvalues.push_back(lambda);
    model.explained.push_back(lambda / total);
    model.components.emplace_back(v.data(), v.data() + v.size());
    if (model.retained == 0) {
      cumulative += lambda / total;
      if (cumulative >= options.variance_to_keep - 1e-9) model.retained = model.components.size();
    }
  }
  if (model.retained == 0) model.retained = model.components.size();
  model.components.resize(model.retained);
  return model;
}

Dataset apply_pca(const PcaModel& model, const Dataset& d) {
  const NumericMatrix x = encode_numeric(d);
  if (x.names != model.input_names) throw DataError("PCA model was fitted on different attributes");
  std::vector<AttributeMeta> attrs;
  for (std::size_t c = 0; c < model.retained; ++c) {
    attrs.push_back({"pc_" + std::to_string(c + 1), AttributeKind::numeric, {}, AttributeRole::regular});
  }
  attrs.push_back(d.target());
  std::vector<double> cells;
  cells.reserve(d.num_rows() * attrs.size());
  for (std::size_t r = 0; r < d.num_rows(); ++r) {
    const auto scores = model.transform(x.row(r));
    cells.insert(cells.end(), scores.begin(), scores.end());
    cells.push_back(d.at(r, d.target_index()));
  }
  return Dataset(std::move(attrs), std::move(cells), d.provenance() + " pca");
}

Dataset pca_reduce(const Dataset& d, const PcaOptions& options) { return apply_pca(fit_pca(d, options), d); }

}  // namespace rpm
