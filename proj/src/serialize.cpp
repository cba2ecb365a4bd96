#include "mil/serialize.hpp"

namespace mil {

Json to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Scaler& scaler) {
  Json j;
  j["means"] = to_json(scaler.means);
  j["stddevs"] = to_json(scaler.stddevs);
  j["constant"] = scaler.constant;
  return j;
}

Json to_json(const ColumnScaler& scaler) {
  Json j;
  j["means"] = to_json(Eigen::VectorXd(scaler.means.transpose()));
  j["stddevs"] = to_json(Eigen::VectorXd(scaler.stddevs.transpose()));
  return j;
}

Json to_json(const TrainConfig& cfg) {
  Json j;
  j["lambda"] = cfg.lambda;
  j["max_iters"] = cfg.max_iters;
  j["tol"] = cfg.tol;
  j["reg"] = to_string(cfg.reg);
  return j;
}

Json to_json(const LinearModel& model) {
  Json j;
  j["w"] = to_json(model.w);
  j["w0"] = model.w0;
  j["lambda"] = model.lambda;
  j["loss"] = to_string(model.loss);
  j["reg"] = to_string(model.reg);
  return j;
}

Json to_json(const ColumnRef& ref) {
  Json j;
  j["bag_id"] = ref.bag_id;
  j["instance"] = ref.instance;
  return j;
}

Json to_json(const SubspaceOrigin& origin) {
  Json j;
  j["kind"] = origin.kind == SubspaceOrigin::Kind::bag ? "bag" : "random";
  if (origin.kind == SubspaceOrigin::Kind::bag) {
    j["bag_id"] = origin.bag_id;
  } else {
    j["draw"] = origin.draw;
  }
  return j;
}

Json to_json(const SubspaceSpec& spec) {
  Json j;
  j["origin"] = to_json(spec.origin);
  Json idx = Json::array();
  for (Eigen::Index i : spec.indices) idx.push_back(static_cast<long long>(i));
  j["indices"] = std::move(idx);
  return j;
}

Json to_json(const EnsembleConfig& cfg) {
  Json j;
  j["scheme"] = to_string(cfg.scheme);
  j["L"] = cfg.L;
  j["s"] = cfg.s;
  j["replacement"] = cfg.replacement;
  j["combiner"] = to_string(cfg.combiner);
  j["loss"] = to_string(cfg.loss);
  j["base"] = to_json(cfg.base);
  j["seed"] = cfg.seed;
  return j;
}

Json to_json(const SubspaceEnsemble& ensemble) {
  Json j;
  j["combiner"] = to_string(ensemble.combiner);
  Json members = Json::array();
  for (const EnsembleMember& m : ensemble.members) {
    Json member;
    member["spec"] = to_json(m.spec);
    member["model"] = to_json(m.model);
    members.push_back(std::move(member));
  }
  j["members"] = std::move(members);
  return j;
}

Json to_json(const Bag& bag) {
  Json j;
  j["id"] = bag.id;
  j["label"] = label_value(bag.label);
  j["instances"] = to_json(bag.instances);
  return j;
}

Json to_json(const EvalResult& result) {
  Json j;
  j["per_fold_auc"] = result.per_fold_auc;
  j["mean_auc"] = result.mean;
  j["stderr"] = result.stderr_;
  j["fold_fingerprint"] = result.fold_fingerprint;
  return j;
}

}  // namespace mil
