#pragma once

#include <string>
#include <vector>

#include "rpm/dataset.hpp"

namespace rpm {

struct AttributeWeight {
  std::string name;
  double chi_square = 0.0;
};

struct AttributeWeights {
  std::vector<AttributeWeight> weights;  // dataset column order
  std::size_t bins = 10;
};

/// Upper bin boundaries for equal-frequency discretisation: the values at
/// ranks floor(j * n / bins), j = 1..bins-1, duplicates merged. A value falls
/// in bin "number of boundaries <= value".
std::vector<double> equal_frequency_cuts(std::vector<double> values, std::size_t bins);

/// Pearson chi-square of a contingency table; rows or columns with zero
/// marginals (zero expected counts) are skipped.
double chi_square_statistic(const std::vector<std::vector<double>>& table);

/// Chi-square of each regular attribute against the class. Numeric attributes
/// are discretised into at most `bins` equal-frequency intervals; nominal
/// attributes use their categories.
AttributeWeights chi_square_weights(const Dataset& d, std::size_t bins = 10);

/// The `v` highest-weight attributes; equal weights keep the order of `w`.
std::vector<std::string> top_v_names(const AttributeWeights& w, std::size_t v);

/// project_attributes(d, top_v_names(w, v)).
Dataset select_top_v(const Dataset& d, const AttributeWeights& w, std::size_t v);

struct PcaModel {
  std::vector<std::string> input_names;
  std::vector<double> means;
  std::vector<double> scales;  // sample std per attribute (1 when not standardising, 0-variance -> 1)
  std::vector<std::vector<double>> components;  // unit vectors, one per retained component
  std::vector<double> eigenvalues;              // all components, descending
  std::vector<double> explained;                // fraction per component, descending
  std::size_t retained = 0;

  /// Scores of one encoded row on the retained components.
  std::vector<double> transform(std::span<const double> row) const;
  /// Maps scores back to the standardised input space.
  std::vector<double> inverse_transform(std::span<const double> scores) const;
};

struct PcaOptions {
  double variance_to_keep = 0.95;
  bool standardize = true;
};

/// Eigen-decomposition of the sample covariance (correlation when
/// standardising) of the encoded regular attributes. Retains the smallest
/// prefix of components whose cumulative explained variance reaches
/// variance_to_keep, at least one.
PcaModel fit_pca(const Dataset& d, const PcaOptions& options = {});

/// Dataset of component scores pc_1..pc_r plus the original target.
Dataset pca_reduce(const Dataset& d, const PcaOptions& options = {});
Dataset apply_pca(const PcaModel& model, const Dataset& d);

}  // namespace rpm
