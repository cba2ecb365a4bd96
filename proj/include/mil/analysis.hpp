#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "mil/dissimilarity.hpp"
#include "mil/ensemble.hpp"

namespace mil {

/// Thresholds posteriors into 0/1 crisp labels.
Eigen::MatrixXi harden(const Eigen::MatrixXd& posteriors, double threshold = 0.5);

/// counts(a,b) = number of objects members a and b label differently.
struct DisagreementMatrix {
  Eigen::MatrixXi counts;
  int n_objects = 0;

  Eigen::MatrixXd fractions() const;
};

DisagreementMatrix disagreement(const Eigen::MatrixXi& hard_labels);
DisagreementMatrix disagreement(const std::vector<std::vector<int>>& hard_labels);

/// Classical multidimensional scaling: double-center the squared distances
/// and embed on the top eigenvectors (negative eigenvalues clamped to zero).
/// Requires a symmetric matrix with zero diagonal.
Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& distances, int dims = 2);

/// AUC of each member on its own column subset of the full feature matrix.
std::vector<double> per_subspace_auc(const SubspaceEnsemble& ensemble, const Eigen::MatrixXd& X,
                                     const std::vector<int>& labels);

struct Correlation {
  double pearson = 0.0;
  double spearman = 0.0;
};

/// Both correlation coefficients between two paired samples; throws if
/// either sample is constant.
Correlation correlation(const std::vector<double>& x, const std::vector<double>& y);

struct RankedColumn {
  Eigen::Index column = 0;
  std::string provenance;  // origin description, empty when unknown
  double mean_abs_weight = 0.0;
  int count = 0;  // selections across members (duplicates counted)
};

struct WeightRanking {
  std::vector<RankedColumn> ranked;            // descending mean |weight|
  std::vector<Eigen::Index> never_selected;    // columns no member used
};

/// Ranks the columns of the full dissimilarity matrix by the mean absolute
/// weight they receive across the members that selected them.
WeightRanking rank_dissimilarities(const SubspaceEnsemble& ensemble, Eigen::Index total_cols,
                                   std::span<const ColumnRef> provenance = {});

}  // namespace mil
