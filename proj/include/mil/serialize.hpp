#pragma once

#include <Eigen/Dense>

#include "json.hpp"
#include "mil/dataset.hpp"
#include "mil/dissimilarity.hpp"
#include "mil/ensemble.hpp"
#include "mil/evaluation.hpp"
#include "mil/linear.hpp"
#include "mil/scaler.hpp"

namespace mil {

using Json = nlohmann::ordered_json;

Json to_json(const Eigen::VectorXd& v);
Json to_json(const Eigen::MatrixXd& m);  // array of rows

Json to_json(const Scaler& scaler);
Json to_json(const ColumnScaler& scaler);
Json to_json(const TrainConfig& cfg);
Json to_json(const LinearModel& model);
Json to_json(const ColumnRef& ref);
Json to_json(const SubspaceOrigin& origin);
Json to_json(const SubspaceSpec& spec);
Json to_json(const EnsembleConfig& cfg);
Json to_json(const SubspaceEnsemble& ensemble);
Json to_json(const Bag& bag);
Json to_json(const EvalResult& result);

}  // namespace mil
