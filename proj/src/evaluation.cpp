#include "mil/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mil/rng.hpp"

namespace mil {

namespace {

/// Two-sided critical values at significance 0.05; index = degrees of
/// freedom, 1..30. Larger df falls back to the normal approximation 1.96.
constexpr double kTCritical[31] = {
    0.0,    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    2.201,  2.179,  2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080,
    2.074,  2.069,  2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};

double critical_value(int df) {
  if (df < 1) throw std::invalid_argument("t-test needs at least 1 degree of freedom");
  return df <= 30 ? kTCritical[df] : 1.96;
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStderr mean_and_stderr(const std::vector<double>& values) {
  const auto n = static_cast<double>(values.size());
  MeanStderr out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

std::vector<std::size_t> indices_with_label(const std::vector<int>& labels, int wanted) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == wanted) out.push_back(i);
  return out;
}

}  // namespace

double auc(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(scores.size()) != labels.size())
    throw std::invalid_argument("score count does not match label count");
  if (!scores.allFinite()) throw std::invalid_argument("non-finite score");
  const Eigen::Index n = scores.size();

  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  for (int l : labels) {
    if (l == 1) {
      ++n_pos;
    } else if (l == -1) {
      ++n_neg;
    } else {
      throw std::invalid_argument("AUC labels must be +1 or -1");
    }
  }
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("AUC needs both classes");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

  // Average rank within each tied block, 1-based ranks.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t)
      if (labels[static_cast<std::size_t>(order[t])] == 1) rank_sum_pos += avg_rank;
    i = j + 1;
  }

  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

std::uint64_t FoldPlan::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(k));
  for (int a : assignments) mix(static_cast<std::uint64_t>(a));
  return h;
}

FoldPlan stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("fold count must be at least 2");
  for (int l : labels)
    if (l != 1 && l != -1)
      throw std::invalid_argument("fold assignment requires labeled objects (+1 or -1)");

  std::vector<std::size_t> pos = indices_with_label(labels, 1);
  std::vector<std::size_t> neg = indices_with_label(labels, -1);
  if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("each class needs at least k objects for k folds");

  Rng rng(stream_seed(seed, "stratified-folds"));
  rng.shuffle(pos);
  rng.shuffle(neg);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(labels.size(), -1);
  // One dealing cursor shared across classes keeps total fold sizes within
  // one of each other even when both class sizes leave remainders.
  int cursor = 0;
  for (std::size_t idx : pos) {
    plan.assignments[idx] = cursor;
    cursor = (cursor + 1) % k;
  }
  for (std::size_t idx : neg) {
    plan.assignments[idx] = cursor;
    cursor = (cursor + 1) % k;
  }
  return plan;
}

EvalResult cross_validate(const Dataset& ds, const FitFunction& fit, int k, std::uint64_t seed) {
  return cross_validate(ds, fit, stratified_kfold(ds.labels(), k, seed), seed);
}

EvalResult cross_validate(const Dataset& ds, const FitFunction& fit, const FoldPlan& plan,
                          std::uint64_t seed) {
  if (plan.assignments.size() != ds.bags.size())
    throw std::invalid_argument("fold plan does not cover this dataset");

  EvalResult result;
  result.fold_fingerprint = plan.fingerprint();
  result.per_fold_auc.reserve(static_cast<std::size_t>(plan.k));

  for (int fold = 0; fold < plan.k; ++fold) {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < plan.assignments.size(); ++i)
      (plan.assignments[i] == fold ? test_idx : train_idx).push_back(i);

    try {
      const Dataset train = select_bags(ds, train_idx);
      const Dataset test = select_bags(ds, test_idx);
      const auto scorer = fit(train, stream_seed(seed, "fold-fit", static_cast<std::uint64_t>(fold)));
      result.per_fold_auc.push_back(auc(scorer->score(test), test.labels()));
    } catch (const std::exception& e) {
      throw std::runtime_error("fold " + std::to_string(fold) + ": " + e.what());
    }
  }

  const MeanStderr ms = mean_and_stderr(result.per_fold_auc);
  result.mean = ms.mean;
  result.stderr_ = ms.stderr_;
  return result;
}

PairedComparison paired_comparison(const EvalResult& a, const EvalResult& b) {
  if (a.fold_fingerprint != b.fold_fingerprint)
    throw std::invalid_argument("paired comparison requires identical fold plans");
  if (a.per_fold_auc.size() != b.per_fold_auc.size() || a.per_fold_auc.size() < 2)
    throw std::invalid_argument("paired comparison needs at least 2 folds");

  const auto k = a.per_fold_auc.size();
  std::vector<double> diffs(k);
  for (std::size_t i = 0; i < k; ++i) diffs[i] = a.per_fold_auc[i] - b.per_fold_auc[i];

  PairedComparison cmp;
  cmp.df = static_cast<int>(k) - 1;
  cmp.critical = critical_value(cmp.df);
  cmp.mean_diff = std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(k);
  double ss = 0.0;
  for (double d : diffs) ss += (d - cmp.mean_diff) * (d - cmp.mean_diff);
  const double sd = std::sqrt(ss / static_cast<double>(k - 1));

  if (sd <= 1e-12) {
    // Identical per-fold differences: any nonzero mean difference is
    // perfectly consistent, a zero one is a perfect tie.
    cmp.t_stat = 0.0;
    if (cmp.mean_diff > 1e-12) {
      cmp.outcome = Outcome::a_better;
    } else if (cmp.mean_diff < -1e-12) {
      cmp.outcome = Outcome::b_better;
    } else {
      cmp.outcome = Outcome::indistinguishable;
    }
    return cmp;
  }

  cmp.t_stat = cmp.mean_diff / (sd / std::sqrt(static_cast<double>(k)));
  if (std::abs(cmp.t_stat) > cmp.critical) {
    cmp.outcome = cmp.mean_diff > 0.0 ? Outcome::a_better : Outcome::b_better;
  } else {
    cmp.outcome = Outcome::indistinguishable;
  }
  return cmp;
}

std::vector<CurvePoint> learning_curve(const Dataset& ds, const FitFunction& fit,
                                       const std::vector<int>& sizes, int repeats,
                                       std::uint64_t seed, double test_fraction) {
  if (sizes.empty()) throw std::invalid_argument("learning curve needs at least one size");
  if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test fraction must lie strictly between 0 and 1");

  const std::vector<int> labels = ds.labels();
  std::vector<std::size_t> pos = indices_with_label(labels, 1);
  std::vector<std::size_t> neg = indices_with_label(labels, -1);
  if (pos.empty() || neg.empty())
    throw std::invalid_argument("learning curve needs both classes");
  if (pos.size() + neg.size() != labels.size())
    throw std::invalid_argument("learning curve requires labeled objects (+1 or -1)");

  const auto test_pos = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(pos.size()))));
  const auto test_neg = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(neg.size()))));
  const std::size_t pool_pos = pos.size() - test_pos;
  const std::size_t pool_neg = neg.size() - test_neg;
  if (pool_pos < 1 || pool_neg < 1)
    throw std::invalid_argument("test fraction leaves no training objects in some class");
  const std::size_t pool_total = pool_pos + pool_neg;

  for (int m : sizes) {
    if (m < 2 || static_cast<std::size_t>(m) > pool_total)
      throw std::invalid_argument("training size " + std::to_string(m) +
                                  " outside valid range [2, " + std::to_string(pool_total) + "]");
  }

  // aucs[si][r]
  std::vector<std::vector<double>> aucs(sizes.size(), std::vector<double>(repeats, 0.0));

  for (int r = 0; r < repeats; ++r) {
    Rng rng(stream_seed(seed, "curve-split", static_cast<std::uint64_t>(r)));
    std::vector<std::size_t> pos_shuffled = pos;
    std::vector<std::size_t> neg_shuffled = neg;
    rng.shuffle(pos_shuffled);
    rng.shuffle(neg_shuffled);

    std::vector<std::size_t> test_idx(pos_shuffled.begin(),
                                      pos_shuffled.begin() + static_cast<long>(test_pos));
    test_idx.insert(test_idx.end(), neg_shuffled.begin(),
                    neg_shuffled.begin() + static_cast<long>(test_neg));
    const std::vector<std::size_t> train_pos(pos_shuffled.begin() + static_cast<long>(test_pos),
                                             pos_shuffled.end());
    const std::vector<std::size_t> train_neg(neg_shuffled.begin() + static_cast<long>(test_neg),
                                             neg_shuffled.end());
    const Dataset test = select_bags(ds, test_idx);

    for (std::size_t si = 0; si < sizes.size(); ++si) {
      const auto m = static_cast<std::size_t>(sizes[si]);
      // Proportional per-class allocation, clamped so both classes appear
      // and neither pool is exceeded.
      std::size_t m_pos = static_cast<std::size_t>(
          std::lround(static_cast<double>(m) * static_cast<double>(pool_pos) /
                      static_cast<double>(pool_total)));
      m_pos = std::min(m_pos, std::min(pool_pos, m - 1));
      m_pos = std::max(m_pos, m > pool_neg ? m - pool_neg : std::size_t{1});
      const std::size_t m_neg = m - m_pos;

      std::vector<std::size_t> train_idx(train_pos.begin(),
                                         train_pos.begin() + static_cast<long>(m_pos));
      train_idx.insert(train_idx.end(), train_neg.begin(),
                       train_neg.begin() + static_cast<long>(m_neg));
      const Dataset train = select_bags(ds, train_idx);
      const std::uint64_t fit_seed = stream_seed(
          seed, "curve-fit", (static_cast<std::uint64_t>(r) << 32) | static_cast<std::uint64_t>(si));
      const auto scorer = fit(train, fit_seed);
      aucs[si][static_cast<std::size_t>(r)] = auc(scorer->score(test), test.labels());
    }
  }

  std::vector<CurvePoint> curve;
  curve.reserve(sizes.size());
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const MeanStderr ms = mean_and_stderr(aucs[si]);
    curve.push_back(CurvePoint{sizes[si], ms.mean, ms.stderr_});
  }
  return curve;
}

}  // namespace mil
