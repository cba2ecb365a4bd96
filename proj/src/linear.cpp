#include "mil/linear.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

namespace mil {

LossKind parse_loss(std::string_view text) {
  if (text == "hinge") return LossKind::hinge;
  if (text == "logistic") return LossKind::logistic;
  throw std::invalid_argument("unknown loss: " + std::string(text));
}

std::string to_string(LossKind loss) {
  return loss == LossKind::hinge ? "hinge" : "logistic";
}

RegKind parse_reg(std::string_view text) {
  if (text == "l2") return RegKind::l2;
  if (text == "l1") return RegKind::l1;
  throw std::invalid_argument("unknown regularizer: " + std::string(text));
}

std::string to_string(RegKind reg) { return reg == RegKind::l2 ? "l2" : "l1"; }

namespace {

double loss_value(LossKind loss, double m) {
  switch (loss) {
    case LossKind::hinge: {
      const double gap = std::max(0.0, 1.0 - m);
      return gap * gap;
    }
    case LossKind::logistic:
      // log(1+exp(-m)) without overflow for large |m|.
      return m < 0.0 ? -m + std::log1p(std::exp(m)) : std::log1p(std::exp(-m));
  }
  throw std::logic_error("unknown loss");
}

double loss_deriv(LossKind loss, double m) {
  switch (loss) {
    case LossKind::hinge:
      return -2.0 * std::max(0.0, 1.0 - m);
    case LossKind::logistic:
      // d/dm log(1+exp(-m)) = -1/(1+exp(m)); exp overflow is benign here
      // (1/inf == 0) but guard anyway for -ffast-math style surprises.
      return m > 0.0 ? -std::exp(-m) / (1.0 + std::exp(-m)) : -1.0 / (1.0 + std::exp(m));
  }
  throw std::logic_error("unknown loss");
}

void check_training_inputs(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const TrainConfig& cfg) {
  if (X.rows() != y.size()) throw std::invalid_argument("row count does not match label count");
  if (X.rows() == 0) throw std::invalid_argument("empty training set");
  if (!X.allFinite()) throw std::invalid_argument("non-finite feature value in training data");
  bool has_pos = false;
  bool has_neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] == 1.0) {
      has_pos = true;
    } else if (y[i] == -1.0) {
      has_neg = true;
    } else {
      throw std::invalid_argument("training labels must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg)
    throw std::invalid_argument("training set must contain both classes");
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
}

/// Mean data loss and its gradient (no regularizer).
double data_loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                 const Eigen::VectorXd& w, double w0) {
  const Eigen::VectorXd margins = y.array() * ((X * w).array() + w0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) total += loss_value(loss, margins[i]);
  return total / static_cast<double>(X.rows());
}

void data_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                   const Eigen::VectorXd& w, double w0, Eigen::VectorXd& grad_w,
                   double& grad_w0) {
  const Eigen::Index n = X.rows();
  const Eigen::VectorXd margins = y.array() * ((X * w).array() + w0);
  Eigen::VectorXd coeff(n);
  for (Eigen::Index i = 0; i < n; ++i) coeff[i] = loss_deriv(loss, margins[i]) * y[i];
  coeff /= static_cast<double>(n);
  grad_w = X.transpose() * coeff;
  grad_w0 = coeff.sum();
}

struct Objective {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  LossKind loss;
  double lambda;

  // theta packs [w; w0]; the regularizer never touches the last entry.
  double value(const Eigen::VectorXd& theta) const {
    const Eigen::Index p = theta.size() - 1;
    const Eigen::VectorXd w = theta.head(p);
    return data_loss(X, y, loss, w, theta[p]) + lambda * w.squaredNorm();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const {
    const Eigen::Index p = theta.size() - 1;
    Eigen::VectorXd gw;
    double g0 = 0.0;
    data_gradient(X, y, loss, theta.head(p), theta[p], gw, g0);
    Eigen::VectorXd g(p + 1);
    g.head(p) = gw + 2.0 * lambda * theta.head(p);
    g[p] = g0;
    return g;
  }
};

/// L-BFGS with Armijo backtracking. Deterministic: fixed start (theta = 0),
/// fixed history length, fixed line-search schedule.
Eigen::VectorXd minimize_lbfgs(const Objective& obj, Eigen::Index dim, int max_iters,
                               double tol) {
  constexpr int kHistory = 10;
  constexpr double kArmijo = 1e-4;
  constexpr double kBacktrack = 0.5;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  double f = obj.value(theta);
  Eigen::VectorXd g = obj.gradient(theta);

  std::deque<Eigen::VectorXd> s_hist;
  std::deque<Eigen::VectorXd> y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < max_iters; ++iter) {
    if (g.norm() <= tol) break;

    // Two-loop recursion for the search direction.
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const Eigen::VectorXd& s = s_hist.back();
      const Eigen::VectorXd& yv = y_hist.back();
      q *= s.dot(yv) / yv.squaredNorm();
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd direction = -q;

    double slope = g.dot(direction);
    if (slope >= 0.0) {  // fall back to steepest descent
      direction = -g;
      slope = -g.squaredNorm();
    }

    double step = 1.0;
    Eigen::VectorXd theta_next;
    double f_next = f;
    bool accepted = false;
    while (step > 1e-20) {
      theta_next = theta + step * direction;
      f_next = obj.value(theta_next);
      if (f_next <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= kBacktrack;
    }
    if (!accepted) break;  // no further progress representable

    const Eigen::VectorXd g_next = obj.gradient(theta_next);
    const Eigen::VectorXd s = theta_next - theta;
    const Eigen::VectorXd yv = g_next - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kHistory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    const double improvement = f - f_next;
    theta = std::move(theta_next);
    f = f_next;
    g = g_next;
    if (improvement <= 1e-16 * (1.0 + std::abs(f))) break;
  }
  return theta;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

/// FISTA (proximal gradient with Nesterov momentum and backtracking) for the
/// l1-regularized objective. The bias takes plain gradient steps.
Eigen::VectorXd minimize_fista(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                               double lambda, int max_iters, double tol) {
  const Eigen::Index p = X.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd momentum = theta;
  double t_momentum = 1.0;
  double step = 1.0;

  auto smooth = [&](const Eigen::VectorXd& th) {
    return data_loss(X, y, loss, th.head(p), th[p]);
  };
  auto smooth_grad = [&](const Eigen::VectorXd& th) {
    Eigen::VectorXd gw;
    double g0 = 0.0;
    data_gradient(X, y, loss, th.head(p), th[p], gw, g0);
    Eigen::VectorXd g(p + 1);
    g.head(p) = gw;
    g[p] = g0;
    return g;
  };
  auto prox = [&](const Eigen::VectorXd& th, double alpha) {
    Eigen::VectorXd out(p + 1);
    for (Eigen::Index j = 0; j < p; ++j) out[j] = soft_threshold(th[j], alpha * lambda);
    out[p] = th[p];
    return out;
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    const double f_m = smooth(momentum);
    const Eigen::VectorXd g_m = smooth_grad(momentum);

    // Backtrack until the quadratic upper bound at `momentum` holds.
    Eigen::VectorXd candidate;
    while (true) {
      candidate = prox(momentum - step * g_m, step);
      const Eigen::VectorXd diff = candidate - momentum;
      const double bound = f_m + g_m.dot(diff) + diff.squaredNorm() / (2.0 * step);
      if (smooth(candidate) <= bound + 1e-15 * (1.0 + std::abs(bound))) break;
      step *= 0.5;
      if (step < 1e-20) break;
    }
    if (step < 1e-20) break;

    const double change = (candidate - theta).norm() / step;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    momentum = candidate + ((t_momentum - 1.0) / t_next) * (candidate - theta);
    theta = candidate;
    t_momentum = t_next;
    if (change <= tol) break;
  }
  return theta;
}

}  // namespace

double linear_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                        RegKind reg, double lambda, const Eigen::VectorXd& w, double w0) {
  const double reg_term =
      reg == RegKind::l2 ? w.squaredNorm() : w.cwiseAbs().sum();
  return data_loss(X, y, loss, w, w0) + lambda * reg_term;
}

void linear_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                     double lambda, const Eigen::VectorXd& w, double w0, Eigen::VectorXd& grad_w,
                     double& grad_w0) {
  data_gradient(X, y, loss, w, w0, grad_w, grad_w0);
  grad_w += 2.0 * lambda * w;
}

LinearModel train_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, LossKind loss,
                         const TrainConfig& cfg) {
  check_training_inputs(X, y, cfg);
  Eigen::VectorXd theta;
  if (cfg.reg == RegKind::l2) {
    const Objective obj{X, y, loss, cfg.lambda};
    theta = minimize_lbfgs(obj, X.cols() + 1, cfg.max_iters, cfg.tol);
  } else {
    theta = minimize_fista(X, y, loss, cfg.lambda, cfg.max_iters, cfg.tol);
  }
  LinearModel model;
  model.w = theta.head(X.cols());
  model.w0 = theta[X.cols()];
  model.lambda = cfg.lambda;
  model.loss = loss;
  model.reg = cfg.reg;
  return model;
}

LinearModel train_linear_svm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const TrainConfig& cfg) {
  return train_linear(X, y, LossKind::hinge, cfg);
}

LinearModel train_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const TrainConfig& cfg) {
  return train_linear(X, y, LossKind::logistic, cfg);
}

double decision(const LinearModel& model, const Eigen::VectorXd& d) {
  if (d.size() != model.w.size())
    throw std::invalid_argument("feature vector length does not match model");
  return model.w.dot(d) + model.w0;
}

Eigen::VectorXd decisions(const LinearModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.w.size())
    throw std::invalid_argument("feature matrix width does not match model");
  return (X * model.w).array() + model.w0;
}

Eigen::VectorXd scores_to_posteriors(const Eigen::VectorXd& scores) {
  if (scores.size() == 0) return scores;
  const double lo = scores.minCoeff();
  const double hi = scores.maxCoeff();
  if (hi == lo) return Eigen::VectorXd::Constant(scores.size(), 0.5);
  return (scores.array() - lo) / (hi - lo);
}

}  // namespace mil
