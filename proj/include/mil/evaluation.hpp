#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "json.hpp"
#include "mil/dataset.hpp"

namespace mil {

/// Area under the ROC curve from the rank statistic: positions of positive
/// scores among all scores, with average ranks across ties. Equals the
/// probability that a random positive outscores a random negative (ties
/// counting one half). Requires both classes.
double auc(const Eigen::VectorXd& scores, const std::vector<int>& labels);

/// A reusable assignment of objects to folds, so different methods can be
/// compared on identical partitions.
struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // fold index per object
  std::uint64_t seed = 0;

  /// Hash of (k, assignments); paired comparisons insist it matches.
  std::uint64_t fingerprint() const;
};

/// Stratified k-fold assignment: each class is shuffled and dealt
/// round-robin, the dealing cursor continuing from one class to the next so
/// both per-class and total fold sizes differ by at most one. Requires at
/// least k objects of each class and no unlabeled objects.
FoldPlan stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed);

/// Anything that can score a batch of bags (higher = more positive).
class BagScorer {
 public:
  virtual ~BagScorer() = default;
  virtual Eigen::VectorXd score(const Dataset& ds) const = 0;
  virtual nlohmann::ordered_json to_json() const = 0;
};

/// Builds a scorer from a training set; the seed feeds any randomized parts.
using FitFunction =
    std::function<std::unique_ptr<BagScorer>(const Dataset& train, std::uint64_t seed)>;

struct EvalResult {
  std::vector<double> per_fold_auc;
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std (n-1) over folds, divided by sqrt(k)
  std::uint64_t fold_fingerprint = 0;
};

/// k-fold cross-validation. Everything learned - the scorer and anything
/// inside it - is fit on the training fold only.
EvalResult cross_validate(const Dataset& ds, const FitFunction& fit, int k, std::uint64_t seed);

/// Same, but on a caller-supplied fold plan (for paired comparisons).
EvalResult cross_validate(const Dataset& ds, const FitFunction& fit, const FoldPlan& plan,
                          std::uint64_t seed);

enum class Outcome { a_better, b_better, indistinguishable };

struct PairedComparison {
  Outcome outcome = Outcome::indistinguishable;
  double mean_diff = 0.0;  // mean of (a - b) per fold
  double t_stat = 0.0;
  double critical = 0.0;  // two-sided threshold at significance 0.05
  int df = 0;
};

/// Paired two-sided t-test over per-fold AUC differences at significance
/// 0.05. Both results must come from the same fold plan.
PairedComparison paired_comparison(const EvalResult& a, const EvalResult& b);

struct CurvePoint {
  int size = 0;  // training bags used
  double mean_auc = 0.0;
  double stderr_ = 0.0;
};

/// Learning curve: per repeat, a stratified holdout of `test_fraction` of the
/// bags is fixed and the remaining pool is shuffled once; each requested size
/// takes a prefix of that shuffle (so smaller training sets nest inside
/// larger ones), fits, and scores the holdout.
std::vector<CurvePoint> learning_curve(const Dataset& ds, const FitFunction& fit,
                                       const std::vector<int>& sizes, int repeats,
                                       std::uint64_t seed, double test_fraction = 0.3);

}  // namespace mil
