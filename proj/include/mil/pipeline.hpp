#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "mil/dataset.hpp"
#include "mil/dissimilarity.hpp"
#include "mil/ensemble.hpp"
#include "mil/evaluation.hpp"
#include "mil/scaler.hpp"

namespace mil {

/// The five bag-level representations with their default learners:
///   Dbag    bag-to-bag dissimilarities, one linear classifier
///   Dinst   bag-to-instance dissimilarities, one linear classifier
///   DBS     bag-to-instance dissimilarities, ensemble over bag subspaces
///   DRS     bag-to-instance dissimilarities, ensemble over random subspaces
///   minimax per-feature min/max summary, one linear classifier
enum class PipelineKind { dbag, dinst, dbs, drs, minimax };

PipelineKind parse_pipeline(std::string_view text);
std::string to_string(PipelineKind kind);

struct Pipeline {
  PipelineKind kind = PipelineKind::drs;
  // Carries the base-learner settings for every kind; the subspace fields
  // only matter for DBS/DRS.
  EnsembleConfig ensemble;
};

/// A fitted pipeline: the scaler, reference bags, and representation
/// statistics come from the training set alone, so scoring new bags touches
/// nothing learned from them.
class PipelineModel : public BagScorer {
 public:
  PipelineKind kind = PipelineKind::drs;
  Scaler scaler;
  std::vector<Bag> prototypes;  // scaled training bags; empty for minimax
  // Standardizes the representation columns (fitted on the training rows)
  // so the regularizer treats heterogeneous columns evenly.
  ColumnScaler rep_scaler;
  std::variant<LinearModel, SubspaceEnsemble> predictor;

  /// Higher = more positive. Single classifiers return raw decision values;
  /// ensembles return fused posteriors.
  Eigen::VectorXd score(const Dataset& ds) const override;
  nlohmann::ordered_json to_json() const override;

  const SubspaceEnsemble& ensemble() const;
  const LinearModel& linear() const;

  /// The feature matrix this model builds for a batch of bags (after
  /// scaling, against the stored reference bags).
  Eigen::MatrixXd features(const Dataset& ds) const;
};

PipelineModel fit_pipeline(const Pipeline& pipeline, const Dataset& train, std::uint64_t seed);

/// Adapts a pipeline description to the cross-validation driver.
FitFunction pipeline_fitter(const Pipeline& pipeline);

}  // namespace mil
