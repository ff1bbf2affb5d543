#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rpm/dataset.hpp"
#include "rpm/ensemble_eval.hpp"
#include "rpm/learners.hpp"

namespace rpm {

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> labels;               // one per matrix row
  std::vector<std::vector<double>> centroids;    // k vectors
  std::size_t iterations = 0;
  double wcss = 0.0;
  std::vector<double> wcss_history;              // after each Lloyd iteration

  std::vector<std::size_t> sizes() const;
};

struct KMeansOptions {
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  double tol = 0.0;
  // Independent k-means++ starts; the lowest-WCSS run is kept.
  std::size_t restarts = 1;
};

/// Lloyd's algorithm with k-means++ seeding over the rows of `m`. Stops when
/// the assignment is stable, the largest centroid shift is below `tol`, or
/// after `max_iter` iterations. A cluster that empties is re-seeded with the
/// member farthest from its centroid, which never increases WCSS. The Lloyd
/// fixed point is then refined by single-point moves that lower WCSS.
ClusterAssignment kmeans(const AttributeMatrix& m, const KMeansOptions& options);

double wcss(const AttributeMatrix& m, const std::vector<std::size_t>& labels, const std::vector<std::vector<double>>& centroids);

struct ClusterDataset {
  std::size_t cluster = 0;
  std::vector<std::string> attributes;
  Dataset data;
};

/// One projected dataset per non-empty cluster, in cluster-id order. The
/// assignment labels must follow d's regular attributes in column order.
std::vector<ClusterDataset> split_by_cluster(const Dataset& d, const ClusterAssignment& a);

struct ClusterScore {
  std::size_t cluster = 0;
  std::vector<std::string> attributes;
  MeanStd accuracy;
};

struct ClusterChoice {
  std::size_t index = 0;  // position in the input list
  std::vector<ClusterScore> scores;
};

struct ClusterScoring {
  std::size_t folds = 10;
  LearnerSpec learner = LearnerSpec::cart();
  CvOptions cv;
};

/// Scores every cluster by cross-validated CART accuracy and returns the best.
/// Ties prefer the cluster with more attributes, then the lower cluster id.
ClusterChoice pick_best_cluster(const std::vector<ClusterDataset>& clusters, std::uint64_t seed,
                                const ClusterScoring& scoring = {});

/// Argmax over accuracy with the tie rule above; exposed for direct testing.
std::size_t choose_cluster(const std::vector<ClusterScore>& scores);

}  // namespace rpm
