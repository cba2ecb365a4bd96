#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mil/dataset.hpp"

namespace mil {

/// Per-feature standardization statistics, fitted over all instances of all
/// bags pooled. Standard deviation uses the population convention (divide by
/// the instance count). A feature whose values are constant gets its stddev
/// substituted by 1 and is flagged in `constant`; after centering such a
/// feature is all-zero.
struct Scaler {
  Eigen::VectorXd means;
  Eigen::VectorXd stddevs;
  std::vector<bool> constant;
};

Scaler fit_scaler(const Dataset& train);

/// Returns a copy of `data` with every instance x replaced by
/// (x - means) / stddevs. Bag structure and labels are unchanged.
Dataset apply_scaler(const Scaler& scaler, const Dataset& data);

/// Column standardization statistics for a feature matrix (rows = objects,
/// columns = features). Same conventions as Scaler: population standard
/// deviation, constant columns get stddev 1 so they become all-zero after
/// centering. Used to put heterogeneous representation columns on a common
/// scale before a regularized linear model.
struct ColumnScaler {
  Eigen::RowVectorXd means;
  Eigen::RowVectorXd stddevs;
};

ColumnScaler fit_column_scaler(const Eigen::MatrixXd& train);

/// (X - means) / stddevs applied row-wise; X must have the fitted width.
/// Throws std::invalid_argument on a width mismatch.
Eigen::MatrixXd apply_column_scaler(const ColumnScaler& scaler, const Eigen::MatrixXd& X);

}  // namespace mil
