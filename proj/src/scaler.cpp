#include "mil/scaler.hpp"

#include <cmath>
#include <stdexcept>

namespace mil {

Scaler fit_scaler(const Dataset& train) {
  if (train.bags.empty()) throw std::invalid_argument("fit_scaler: dataset is empty");
  const Eigen::Index d = train.dim;
  const double count = static_cast<double>(train.total_instances());

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  for (const Bag& bag : train.bags) sum += bag.instances.colwise().sum().transpose();
  const Eigen::VectorXd means = sum / count;

  Eigen::VectorXd sq = Eigen::VectorXd::Zero(d);
  for (const Bag& bag : train.bags) {
    const Eigen::MatrixXd centered = bag.instances.rowwise() - means.transpose();
    sq += centered.array().square().colwise().sum().matrix().transpose();
  }

  Scaler scaler;
  scaler.means = means;
  scaler.stddevs.resize(d);
  scaler.constant.assign(static_cast<std::size_t>(d), false);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double sd = std::sqrt(sq[j] / count);
    if (sd <= 1e-12 * std::max(1.0, std::abs(means[j]))) {
      scaler.stddevs[j] = 1.0;
      scaler.constant[static_cast<std::size_t>(j)] = true;
    } else {
      scaler.stddevs[j] = sd;
    }
  }
  return scaler;
}

Dataset apply_scaler(const Scaler& scaler, const Dataset& data) {
  if (scaler.means.size() != data.dim)
    throw std::invalid_argument("apply_scaler: scaler has dimensionality " +
                                std::to_string(scaler.means.size()) + ", data has " +
                                std::to_string(data.dim));
  Dataset out = data;
  const auto inv = scaler.stddevs.cwiseInverse().transpose();
  for (Bag& bag : out.bags)
    bag.instances = (bag.instances.rowwise() - scaler.means.transpose()).array().rowwise() *
                    inv.array();
  return out;
}

ColumnScaler fit_column_scaler(const Eigen::MatrixXd& train) {
  if (train.rows() == 0) throw std::invalid_argument("fit_column_scaler: matrix has no rows");
  ColumnScaler scaler;
  scaler.means = train.colwise().mean();
  const Eigen::RowVectorXd var =
      (train.rowwise() - scaler.means).array().square().colwise().mean();
  scaler.stddevs.resize(train.cols());
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    const double sd = std::sqrt(var[j]);
    scaler.stddevs[j] = sd <= 1e-12 * std::max(1.0, std::abs(scaler.means[j])) ? 1.0 : sd;
  }
  return scaler;
}

Eigen::MatrixXd apply_column_scaler(const ColumnScaler& scaler, const Eigen::MatrixXd& X) {
  if (X.cols() != scaler.means.size())
    throw std::invalid_argument("apply_column_scaler: scaler has " +
                                std::to_string(scaler.means.size()) + " columns, matrix has " +
                                std::to_string(X.cols()));
  return (X.rowwise() - scaler.means).array().rowwise() / scaler.stddevs.array();
}

}  // namespace mil
