#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mil {

enum class Label : int { negative = -1, unlabeled = 0, positive = +1 };

inline int label_value(Label l) { return static_cast<int>(l); }

/// One MIL object: an ordered set of instance feature vectors plus a label.
/// `instances` is n_i x d, one row per instance.
struct Bag {
  std::string id;
  Eigen::MatrixXd instances;
  Label label = Label::unlabeled;

  Eigen::Index size() const { return instances.rows(); }
};

/// A collection of bags sharing one feature dimensionality.
struct Dataset {
  std::string name;
  Eigen::Index dim = 0;
  std::vector<Bag> bags;

  Eigen::Index total_instances() const;

  /// Per-bag labels as -1/0/+1 integers, in bag order.
  std::vector<int> labels() const;

  std::size_t count(Label l) const;

  /// Checks structural invariants: every bag nonempty, dimensionalities equal
  /// to `dim`, bag ids unique. Throws std::invalid_argument on violation.
  void validate() const;
};

/// New dataset holding copies of the chosen bags, in the given order.
Dataset select_bags(const Dataset& ds, const std::vector<std::size_t>& indices);

}  // namespace mil
