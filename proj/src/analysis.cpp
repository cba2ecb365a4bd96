#include "mil/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mil/evaluation.hpp"

namespace mil {

Eigen::MatrixXi harden(const Eigen::MatrixXd& posteriors, double threshold) {
  Eigen::MatrixXi hard(posteriors.rows(), posteriors.cols());
  for (Eigen::Index r = 0; r < posteriors.rows(); ++r)
    for (Eigen::Index c = 0; c < posteriors.cols(); ++c)
      hard(r, c) = posteriors(r, c) > threshold ? 1 : 0;
  return hard;
}

Eigen::MatrixXd DisagreementMatrix::fractions() const {
  if (n_objects == 0) return Eigen::MatrixXd::Zero(counts.rows(), counts.cols());
  return counts.cast<double>() / static_cast<double>(n_objects);
}

DisagreementMatrix disagreement(const Eigen::MatrixXi& hard_labels) {
  const Eigen::Index L = hard_labels.rows();
  DisagreementMatrix out;
  out.n_objects = static_cast<int>(hard_labels.cols());
  out.counts = Eigen::MatrixXi::Zero(L, L);
  for (Eigen::Index a = 0; a < L; ++a) {
    for (Eigen::Index b = a + 1; b < L; ++b) {
      const int n =
          static_cast<int>((hard_labels.row(a).array() != hard_labels.row(b).array()).count());
      out.counts(a, b) = n;
      out.counts(b, a) = n;
    }
  }
  return out;
}

DisagreementMatrix disagreement(const std::vector<std::vector<int>>& hard_labels) {
  if (hard_labels.empty()) throw std::invalid_argument("no member labelings");
  const std::size_t n = hard_labels.front().size();
  for (const auto& row : hard_labels)
    if (row.size() != n)
      throw std::invalid_argument("member labelings must cover the same objects");
  Eigen::MatrixXi hard(static_cast<Eigen::Index>(hard_labels.size()),
                       static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < hard_labels.size(); ++r)
    for (std::size_t c = 0; c < n; ++c)
      hard(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = hard_labels[r][c];
  return disagreement(hard);
}

Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& distances, int dims) {
  const Eigen::Index n = distances.rows();
  if (n != distances.cols()) throw std::invalid_argument("distance matrix must be square");
  if (n < 1) throw std::invalid_argument("empty distance matrix");
  if (dims < 1 || static_cast<Eigen::Index>(dims) > n)
    throw std::invalid_argument("embedding dimension out of range");
  const double scale = std::max(1.0, distances.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(distances(i, i)) > 1e-12 * scale)
      throw std::invalid_argument("distance matrix must have zero diagonal");
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(distances(i, j) - distances(j, i)) > 1e-9 * scale)
        throw std::invalid_argument("distance matrix must be symmetric");
  }

  const Eigen::MatrixXd sq = distances.array().square();
  const Eigen::MatrixXd J =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd B = -0.5 * J * sq * J;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");

  // Eigenvalues come back ascending; take the largest `dims`, clamping
  // negative ones (numerical noise or non-Euclidean input) to zero.
  Eigen::MatrixXd coords(n, dims);
  for (int d = 0; d < dims; ++d) {
    const Eigen::Index src = n - 1 - d;
    const double lambda = std::max(0.0, solver.eigenvalues()[src]);
    coords.col(d) = solver.eigenvectors().col(src) * std::sqrt(lambda);
  }
  return coords;
}

std::vector<double> per_subspace_auc(const SubspaceEnsemble& ensemble, const Eigen::MatrixXd& X,
                                     const std::vector<int>& labels) {
  std::vector<double> out;
  out.reserve(ensemble.members.size());
  for (const EnsembleMember& member : ensemble.members) {
    const Eigen::VectorXd scores =
        decisions(member.model, restrict_columns(X, member.spec.indices));
    out.push_back(auc(scores, labels));
  }
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson_of(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw std::invalid_argument("correlation undefined for a constant sample");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

Correlation correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("samples must be paired");
  if (x.size() < 2) throw std::invalid_argument("correlation needs at least 2 pairs");
  Correlation c;
  c.pearson = pearson_of(x, y);
  c.spearman = pearson_of(average_ranks(x), average_ranks(y));
  return c;
}

WeightRanking rank_dissimilarities(const SubspaceEnsemble& ensemble, Eigen::Index total_cols,
                                   std::span<const ColumnRef> provenance) {
  if (total_cols < 1) throw std::invalid_argument("no columns to rank");
  if (!provenance.empty() && static_cast<Eigen::Index>(provenance.size()) != total_cols)
    throw std::invalid_argument("provenance length does not match column count");

  std::vector<double> abs_sum(static_cast<std::size_t>(total_cols), 0.0);
  std::vector<int> count(static_cast<std::size_t>(total_cols), 0);
  for (const EnsembleMember& member : ensemble.members) {
    for (std::size_t j = 0; j < member.spec.indices.size(); ++j) {
      const Eigen::Index col = member.spec.indices[j];
      if (col < 0 || col >= total_cols)
        throw std::out_of_range("subspace index out of range for column count");
      abs_sum[static_cast<std::size_t>(col)] +=
          std::abs(member.model.w[static_cast<Eigen::Index>(j)]);
      ++count[static_cast<std::size_t>(col)];
    }
  }

  WeightRanking ranking;
  for (Eigen::Index c = 0; c < total_cols; ++c) {
    const auto uc = static_cast<std::size_t>(c);
    if (count[uc] == 0) {
      ranking.never_selected.push_back(c);
      continue;
    }
    RankedColumn rc;
    rc.column = c;
    if (!provenance.empty()) {
      const ColumnRef& ref = provenance[uc];
      rc.provenance =
          ref.whole_bag() ? ref.bag_id : ref.bag_id + ":" + std::to_string(ref.instance);
    }
    rc.mean_abs_weight = abs_sum[uc] / static_cast<double>(count[uc]);
    rc.count = count[uc];
    ranking.ranked.push_back(std::move(rc));
  }
  std::sort(ranking.ranked.begin(), ranking.ranked.end(),
            [](const RankedColumn& a, const RankedColumn& b) {
              if (a.mean_abs_weight != b.mean_abs_weight)
                return a.mean_abs_weight > b.mean_abs_weight;
              return a.column < b.column;
            });
  return ranking;
}

}  // namespace mil
