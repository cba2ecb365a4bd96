#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "mil/dataset.hpp"

namespace mil {

/// Provenance of one column of a dissimilarity matrix: either a whole
/// prototype bag (instance < 0) or one prototype instance.
struct ColumnRef {
  std::string bag_id;
  Eigen::Index instance = -1;

  bool whole_bag() const { return instance < 0; }
  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

/// Rectangular matrix of dissimilarities from objects (rows) to prototype
/// columns. Entries are nonnegative; the provenance records which training
/// bag or instance each column came from.
struct DissimMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> row_ids;
  std::vector<ColumnRef> columns;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  /// True when every column refers to a single prototype instance.
  bool instance_level() const;
};

/// Squared Euclidean distance between two instances.
double instance_dist(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Mean over B_i's instances of the minimum distance to B_j's instances.
/// Not symmetric in general; exactly zero when B_i == B_j.
double bag_dissim(const Bag& b_i, const Bag& b_j);

/// Instance-level representation of `bag`: one entry per prototype instance
/// (prototype bags in order, instances in order within each bag), the entry
/// for prototype instance x being the minimum distance from any of `bag`'s
/// instances to x. Length is the total prototype instance count.
Eigen::VectorXd instance_rep_row(const Bag& bag, std::span<const Bag> prototypes);

/// N x M matrix of bag dissimilarities; columns carry whole-bag provenance.
DissimMatrix build_bag_matrix(const Dataset& objects, std::span<const Bag> repr_set);

/// N x (sum of prototype bag sizes) matrix of instance dissimilarities.
DissimMatrix build_inst_matrix(const Dataset& objects, std::span<const Bag> repr_set);

/// Per-feature minima followed by per-feature maxima over the bag's
/// instances; length 2d.
Eigen::VectorXd minimax_rep(const Bag& bag);

/// CSV serialization: a '#'-prefixed provenance header block (one line per
/// column), then one `row_id,v0,...` line per object row.
std::string matrix_to_csv(const DissimMatrix& matrix);
void write_matrix_csv(const DissimMatrix& matrix, const std::string& path);

}  // namespace mil
