#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mil/dissimilarity.hpp"
#include "mil/linear.hpp"

namespace mil {

/// BS: one subspace per training bag (its instance columns). RS: fixed-size
/// random column draws.
enum class SubspaceScheme { BS, RS };

enum class Combiner { mean, vote, product, max };

SubspaceScheme parse_scheme(std::string_view text);
std::string to_string(SubspaceScheme scheme);
Combiner parse_combiner(std::string_view text);
std::string to_string(Combiner combiner);

/// Where a subspace came from: the training bag that contributed its columns,
/// or the index of the random draw that produced it.
struct SubspaceOrigin {
  enum class Kind { bag, random };
  Kind kind = Kind::random;
  std::string bag_id;  // set for Kind::bag
  int draw = -1;       // set for Kind::random
};

std::string origin_label(const SubspaceOrigin& origin);

struct SubspaceSpec {
  std::vector<Eigen::Index> indices;  // columns of the full matrix; may repeat
  SubspaceOrigin origin;
};

struct EnsembleConfig {
  SubspaceScheme scheme = SubspaceScheme::RS;
  int L = 100;    // number of subspaces (RS only; BS is one per bag)
  int s = 0;      // subspace size; 0 means ceil(total_columns / 5)
  bool replacement = true;
  Combiner combiner = Combiner::mean;
  LossKind loss = LossKind::hinge;
  TrainConfig base;
  std::uint64_t seed = 0;
};

struct EnsembleMember {
  SubspaceSpec spec;
  LinearModel model;
};

struct SubspaceEnsemble {
  std::vector<EnsembleMember> members;
  Combiner combiner = Combiner::mean;
};

/// Default random-subspace size: one fifth of the available columns,
/// rounded up.
Eigen::Index default_subspace_size(Eigen::Index total_cols);

/// Groups the columns of an instance-level matrix by originating bag, in
/// first-appearance order. Requires per-instance provenance.
std::vector<SubspaceSpec> bag_subspaces(const DissimMatrix& matrix);

/// Draws L subspaces of s columns each. Each draw uses its own named RNG
/// stream, so a longer ensemble extends a shorter one with the same seed
/// member-for-member.
std::vector<SubspaceSpec> random_subspaces(Eigen::Index total_cols, int L, int s,
                                           bool replacement, std::uint64_t seed);

/// Copies the selected columns (in order, duplicates preserved).
Eigen::MatrixXd restrict_columns(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& indices);

/// Trains one linear classifier per subspace on the restricted features.
SubspaceEnsemble train_ensemble(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const std::vector<SubspaceSpec>& specs, Combiner combiner,
                                LossKind loss, const TrainConfig& base);

/// Per-member posteriors for a batch: row l holds member l's min-max
/// normalized scores over the batch.
Eigen::MatrixXd member_posteriors(const SubspaceEnsemble& ensemble, const Eigen::MatrixXd& X);

/// Fuses an L x N posterior matrix into one posterior per column.
Eigen::VectorXd combine(const Eigen::MatrixXd& posteriors, Combiner combiner);

Eigen::VectorXd predict_ensemble(const SubspaceEnsemble& ensemble, const Eigen::MatrixXd& X);

}  // namespace mil
