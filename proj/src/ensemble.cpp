#include "mil/ensemble.hpp"

#include <map>
#include <stdexcept>

#include "mil/rng.hpp"

namespace mil {

SubspaceScheme parse_scheme(std::string_view text) {
  if (text == "BS") return SubspaceScheme::BS;
  if (text == "RS") return SubspaceScheme::RS;
  throw std::invalid_argument("unknown subspace scheme: " + std::string(text));
}

std::string to_string(SubspaceScheme scheme) {
  return scheme == SubspaceScheme::BS ? "BS" : "RS";
}

Combiner parse_combiner(std::string_view text) {
  if (text == "mean") return Combiner::mean;
  if (text == "vote") return Combiner::vote;
  if (text == "product") return Combiner::product;
  if (text == "max") return Combiner::max;
  throw std::invalid_argument("unknown combiner: " + std::string(text));
}

std::string to_string(Combiner combiner) {
  switch (combiner) {
    case Combiner::mean: return "mean";
    case Combiner::vote: return "vote";
    case Combiner::product: return "product";
    case Combiner::max: return "max";
  }
  throw std::logic_error("unknown combiner");
}

std::string origin_label(const SubspaceOrigin& origin) {
  if (origin.kind == SubspaceOrigin::Kind::bag) return "bag:" + origin.bag_id;
  return "random:" + std::to_string(origin.draw);
}

Eigen::Index default_subspace_size(Eigen::Index total_cols) {
  return (total_cols + 4) / 5;
}

std::vector<SubspaceSpec> bag_subspaces(const DissimMatrix& matrix) {
  if (!matrix.instance_level())
    throw std::invalid_argument("bag subspaces require per-instance columns");
  std::vector<SubspaceSpec> specs;
  std::map<std::string, std::size_t> by_bag;
  for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
    const std::string& bag_id = matrix.columns[static_cast<std::size_t>(c)].bag_id;
    auto [it, inserted] = by_bag.try_emplace(bag_id, specs.size());
    if (inserted) {
      SubspaceSpec spec;
      spec.origin.kind = SubspaceOrigin::Kind::bag;
      spec.origin.bag_id = bag_id;
      specs.push_back(std::move(spec));
    }
    specs[it->second].indices.push_back(c);
  }
  return specs;
}

std::vector<SubspaceSpec> random_subspaces(Eigen::Index total_cols, int L, int s,
                                           bool replacement, std::uint64_t seed) {
  if (total_cols < 1) throw std::invalid_argument("no columns to draw subspaces from");
  if (L < 1) throw std::invalid_argument("ensemble size must be at least 1");
  if (s < 1) throw std::invalid_argument("subspace size must be at least 1");
  if (!replacement && s > total_cols)
    throw std::invalid_argument(
        "subspace size exceeds column count for sampling without replacement");

  std::vector<SubspaceSpec> specs;
  specs.reserve(static_cast<std::size_t>(L));
  for (int draw = 0; draw < L; ++draw) {
    Rng rng(stream_seed(seed, "subspace", static_cast<std::uint64_t>(draw)));
    SubspaceSpec spec;
    spec.origin.kind = SubspaceOrigin::Kind::random;
    spec.origin.draw = draw;
    spec.indices.reserve(static_cast<std::size_t>(s));
    if (replacement) {
      for (int j = 0; j < s; ++j)
        spec.indices.push_back(
            static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(total_cols))));
    } else {
      // Partial Fisher-Yates: swap a fresh pick into position j and keep the
      // first s entries.
      std::vector<Eigen::Index> pool(static_cast<std::size_t>(total_cols));
      for (Eigen::Index c = 0; c < total_cols; ++c) pool[static_cast<std::size_t>(c)] = c;
      for (int j = 0; j < s; ++j) {
        const auto pick =
            j + static_cast<Eigen::Index>(
                    rng.uniform_int(static_cast<std::uint64_t>(total_cols - j)));
        std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick)]);
        spec.indices.push_back(pool[static_cast<std::size_t>(j)]);
      }
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

Eigen::MatrixXd restrict_columns(const Eigen::MatrixXd& X,
                                 const std::vector<Eigen::Index>& indices) {
  if (indices.empty()) throw std::invalid_argument("empty column selection");
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const Eigen::Index c = indices[j];
    if (c < 0 || c >= X.cols())
      throw std::out_of_range("column index out of range for feature matrix");
    out.col(static_cast<Eigen::Index>(j)) = X.col(c);
  }
  return out;
}

SubspaceEnsemble train_ensemble(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const std::vector<SubspaceSpec>& specs, Combiner combiner,
                                LossKind loss, const TrainConfig& base) {
  if (specs.empty()) throw std::invalid_argument("ensemble needs at least one subspace");
  SubspaceEnsemble ensemble;
  ensemble.combiner = combiner;
  ensemble.members.reserve(specs.size());
  for (const SubspaceSpec& spec : specs) {
    EnsembleMember member;
    member.spec = spec;
    member.model = train_linear(restrict_columns(X, spec.indices), y, loss, base);
    ensemble.members.push_back(std::move(member));
  }
  return ensemble;
}

Eigen::MatrixXd member_posteriors(const SubspaceEnsemble& ensemble, const Eigen::MatrixXd& X) {
  if (ensemble.members.empty()) throw std::invalid_argument("empty ensemble");
  Eigen::MatrixXd posteriors(static_cast<Eigen::Index>(ensemble.members.size()), X.rows());
  for (std::size_t l = 0; l < ensemble.members.size(); ++l) {
    const EnsembleMember& member = ensemble.members[l];
    const Eigen::VectorXd scores =
        decisions(member.model, restrict_columns(X, member.spec.indices));
    posteriors.row(static_cast<Eigen::Index>(l)) = scores_to_posteriors(scores).transpose();
  }
  return posteriors;
}

Eigen::VectorXd combine(const Eigen::MatrixXd& posteriors, Combiner combiner) {
  if (posteriors.rows() == 0) throw std::invalid_argument("no member posteriors to combine");
  switch (combiner) {
    case Combiner::mean:
      return posteriors.colwise().mean();
    case Combiner::vote: {
      Eigen::VectorXd votes(posteriors.cols());
      for (Eigen::Index c = 0; c < posteriors.cols(); ++c)
        votes[c] = (posteriors.col(c).array() > 0.5).count() /
                   static_cast<double>(posteriors.rows());
      return votes;
    }
    case Combiner::product: {
      Eigen::VectorXd products(posteriors.cols());
      for (Eigen::Index c = 0; c < posteriors.cols(); ++c)
        products[c] = posteriors.col(c).prod();
      // Products shrink with ensemble size; rescale over the batch to keep
      // posteriors spanning [0,1].
      return scores_to_posteriors(products);
    }
    case Combiner::max:
      return posteriors.colwise().maxCoeff();
  }
  throw std::logic_error("unknown combiner");
}

Eigen::VectorXd predict_ensemble(const SubspaceEnsemble& ensemble, const Eigen::MatrixXd& X) {
  return combine(member_posteriors(ensemble, X), ensemble.combiner);
}

}  // namespace mil
