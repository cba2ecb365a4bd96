#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>

namespace mil {

/// Loss families for the regularized linear classifiers. `hinge` is the
/// squared (smoothed) hinge max(0, 1-m)^2, which keeps the objective
/// differentiable; `logistic` is log(1+exp(-m)).
enum class LossKind { hinge, logistic };

/// l2 is the default everywhere; l1 (soft-threshold training) is exposed as
/// an optional sparse variant and used by no built-in pipeline.
enum class RegKind { l2, l1 };

LossKind parse_loss(std::string_view text);
std::string to_string(LossKind loss);
RegKind parse_reg(std::string_view text);
std::string to_string(RegKind reg);

struct TrainConfig {
  // The objective below averages the loss over rows. Classic primal-SVM
  // formulations sum it instead and quote lambda = 1 for desk-scale
  // problems of roughly a hundred rows; 0.01 is that same trade-off
  // expressed against the averaged loss.
  double lambda = 0.01;
  int max_iters = 1000;
  double tol = 1e-8;
  std::uint64_t seed = 0;  // reserved; training is deterministic without it
  RegKind reg = RegKind::l2;
};

/// Linear decision function f(d) = w.d + w0 over a dissimilarity space.
struct LinearModel {
  Eigen::VectorXd w;
  double w0 = 0.0;
  double lambda = 1.0;
  LossKind loss = LossKind::hinge;
  RegKind reg = RegKind::l2;
};

/// Training objective (1/N) sum_i loss(y_i f(d_i)) + lambda * Omega(w),
/// where Omega is ||w||_2^2 or ||w||_1. The bias is not regularized.
double linear_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                        RegKind reg, double lambda, const Eigen::VectorXd& w, double w0);

/// Analytic gradient of the l2-regularized objective.
void linear_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                     double lambda, const Eigen::VectorXd& w, double w0, Eigen::VectorXd& grad_w,
                     double& grad_w0);

/// Trains a linear classifier by deterministic full-batch minimization
/// (L-BFGS with backtracking line search; proximal steps for the l1
/// variant). Requires both classes present and finite inputs.
LinearModel train_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                         const TrainConfig& cfg);

LinearModel train_linear_svm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const TrainConfig& cfg);
LinearModel train_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const TrainConfig& cfg);

double decision(const LinearModel& model, const Eigen::VectorXd& d);
Eigen::VectorXd decisions(const LinearModel& model, const Eigen::MatrixXd& X);

/// Min-max normalization of a score batch into [0,1]; an all-equal batch
/// maps to 0.5. Order-preserving, invariant to positive affine rescaling.
Eigen::VectorXd scores_to_posteriors(const Eigen::VectorXd& scores);

}  // namespace mil
