#include "mil/pipeline.hpp"

#include <stdexcept>

#include "mil/serialize.hpp"

namespace mil {

PipelineKind parse_pipeline(std::string_view text) {
  if (text == "Dbag") return PipelineKind::dbag;
  if (text == "Dinst") return PipelineKind::dinst;
  if (text == "DBS") return PipelineKind::dbs;
  if (text == "DRS") return PipelineKind::drs;
  if (text == "minimax") return PipelineKind::minimax;
  throw std::invalid_argument("unknown pipeline: " + std::string(text));
}

std::string to_string(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::dbag: return "Dbag";
    case PipelineKind::dinst: return "Dinst";
    case PipelineKind::dbs: return "DBS";
    case PipelineKind::drs: return "DRS";
    case PipelineKind::minimax: return "minimax";
  }
  throw std::logic_error("unknown pipeline kind");
}

namespace {

Eigen::MatrixXd minimax_matrix(const Dataset& ds) {
  if (ds.bags.empty()) throw std::invalid_argument("no bags to represent");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(ds.bags.size()), 2 * ds.dim);
  for (std::size_t i = 0; i < ds.bags.size(); ++i)
    X.row(static_cast<Eigen::Index>(i)) = minimax_rep(ds.bags[i]).transpose();
  return X;
}

Eigen::VectorXd label_vector(const Dataset& ds) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(ds.bags.size()));
  for (std::size_t i = 0; i < ds.bags.size(); ++i)
    y[static_cast<Eigen::Index>(i)] = static_cast<double>(label_value(ds.bags[i].label));
  return y;
}

}  // namespace

namespace {

Eigen::MatrixXd raw_representation(PipelineKind kind, const Dataset& scaled,
                                   const std::vector<Bag>& prototypes) {
  switch (kind) {
    case PipelineKind::dbag:
      return build_bag_matrix(scaled, prototypes).values;
    case PipelineKind::dinst:
    case PipelineKind::dbs:
    case PipelineKind::drs:
      return build_inst_matrix(scaled, prototypes).values;
    case PipelineKind::minimax:
      return minimax_matrix(scaled);
  }
  throw std::logic_error("unknown pipeline kind");
}

}  // namespace

Eigen::MatrixXd PipelineModel::features(const Dataset& ds) const {
  const Dataset scaled = apply_scaler(scaler, ds);
  return apply_column_scaler(rep_scaler, raw_representation(kind, scaled, prototypes));
}

Eigen::VectorXd PipelineModel::score(const Dataset& ds) const {
  const Eigen::MatrixXd X = features(ds);
  if (std::holds_alternative<LinearModel>(predictor))
    return decisions(std::get<LinearModel>(predictor), X);
  return predict_ensemble(std::get<SubspaceEnsemble>(predictor), X);
}

const SubspaceEnsemble& PipelineModel::ensemble() const {
  if (!std::holds_alternative<SubspaceEnsemble>(predictor))
    throw std::logic_error("pipeline holds a single classifier, not an ensemble");
  return std::get<SubspaceEnsemble>(predictor);
}

const LinearModel& PipelineModel::linear() const {
  if (!std::holds_alternative<LinearModel>(predictor))
    throw std::logic_error("pipeline holds an ensemble, not a single classifier");
  return std::get<LinearModel>(predictor);
}

nlohmann::ordered_json PipelineModel::to_json() const {
  Json j;
  j["kind"] = mil::to_string(kind);
  j["scaler"] = mil::to_json(scaler);
  j["representation_scaler"] = mil::to_json(rep_scaler);
  Json protos = Json::array();
  for (const Bag& b : prototypes) protos.push_back(mil::to_json(b));
  j["prototypes"] = std::move(protos);
  Json pred;
  if (std::holds_alternative<LinearModel>(predictor)) {
    pred["type"] = "linear";
    pred["model"] = mil::to_json(std::get<LinearModel>(predictor));
  } else {
    pred["type"] = "ensemble";
    pred["model"] = mil::to_json(std::get<SubspaceEnsemble>(predictor));
  }
  j["predictor"] = std::move(pred);
  return j;
}

PipelineModel fit_pipeline(const Pipeline& pipeline, const Dataset& train, std::uint64_t seed) {
  const EnsembleConfig& cfg = pipeline.ensemble;
  PipelineModel model;
  model.kind = pipeline.kind;
  model.scaler = fit_scaler(train);
  const Dataset scaled = apply_scaler(model.scaler, train);
  const Eigen::VectorXd y = label_vector(scaled);
  if (pipeline.kind != PipelineKind::minimax) model.prototypes = scaled.bags;

  // Bag subspaces group columns by their provenance, so that branch keeps
  // the annotated matrix; every branch trains on standardized columns.
  std::vector<SubspaceSpec> specs;
  Eigen::MatrixXd raw;
  if (pipeline.kind == PipelineKind::dbs) {
    const DissimMatrix m = build_inst_matrix(scaled, model.prototypes);
    specs = bag_subspaces(m);
    raw = m.values;
  } else {
    raw = raw_representation(pipeline.kind, scaled, model.prototypes);
  }
  model.rep_scaler = fit_column_scaler(raw);
  const Eigen::MatrixXd X = apply_column_scaler(model.rep_scaler, raw);

  switch (pipeline.kind) {
    case PipelineKind::dbag:
    case PipelineKind::dinst:
    case PipelineKind::minimax:
      model.predictor = train_linear(X, y, cfg.loss, cfg.base);
      break;
    case PipelineKind::dbs:
      model.predictor = train_ensemble(X, y, specs, cfg.combiner, cfg.loss, cfg.base);
      break;
    case PipelineKind::drs: {
      const Eigen::Index cols = X.cols();
      const int s = cfg.s > 0 ? cfg.s : static_cast<int>(default_subspace_size(cols));
      specs = random_subspaces(cols, cfg.L, s, cfg.replacement, seed);
      model.predictor = train_ensemble(X, y, specs, cfg.combiner, cfg.loss, cfg.base);
      break;
    }
  }
  return model;
}

FitFunction pipeline_fitter(const Pipeline& pipeline) {
  return [pipeline](const Dataset& train, std::uint64_t seed) {
    return std::make_unique<PipelineModel>(fit_pipeline(pipeline, train, seed));
  };
}

}  // namespace mil
