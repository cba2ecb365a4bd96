#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "mil/linear.hpp"

namespace {

struct Toy {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

Toy two_point_toy() {
  Toy t;
  t.X.resize(2, 1);
  t.X << -1, 1;
  t.y.resize(2);
  t.y << -1, 1;
  return t;
}

Toy random_problem(std::mt19937_64& rng, int n, int p) {
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  Toy t;
  t.X.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) t.X(i, j) = value(rng);
  t.y.resize(n);
  for (int i = 0; i < n; ++i) t.y[i] = i < n / 2 ? -1.0 : 1.0;
  return t;
}

/// Exhaustive search over (w, w0) in [-3,3]^2 at step 0.01 for single-feature
/// problems: the independent reference minimizer for the same objective.
double grid_search_min_objective(const Toy& t, mil::LossKind loss, double lambda) {
  double best = std::numeric_limits<double>::infinity();
  for (int wi = -300; wi <= 300; ++wi) {
    Eigen::VectorXd w(1);
    w[0] = wi * 0.01;
    for (int bi = -300; bi <= 300; ++bi) {
      const double w0 = bi * 0.01;
      best = std::min(best,
                      mil::linear_objective(t.X, t.y, loss, mil::RegKind::l2, lambda, w, w0));
    }
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Enum parsing
// ---------------------------------------------------------------------------

TEST_CASE("loss and regularizer names parse both ways") {
  CHECK(mil::parse_loss("hinge") == mil::LossKind::hinge);
  CHECK(mil::parse_loss("logistic") == mil::LossKind::logistic);
  CHECK(mil::to_string(mil::LossKind::hinge) == "hinge");
  CHECK(mil::parse_reg("l1") == mil::RegKind::l1);
  CHECK(mil::to_string(mil::RegKind::l2) == "l2");
  CHECK_THROWS_AS(mil::parse_loss("square"), std::invalid_argument);
  CHECK_THROWS_AS(mil::parse_reg("l3"), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Decision function
// ---------------------------------------------------------------------------

TEST_CASE("decision: linear function fixtures") {
  mil::LinearModel zero;
  zero.w = Eigen::VectorXd::Zero(2);
  CHECK(mil::decision(zero, Eigen::VectorXd::Zero(2)) == 0.0);

  mil::LinearModel m;
  m.w.resize(2);
  m.w << 1, -1;
  m.w0 = 0.5;
  Eigen::VectorXd d(2);
  d << 2, 1;
  CHECK(mil::decision(m, d) == 1.5);
}

TEST_CASE("decision: additive in its input up to the bias") {
  mil::LinearModel m;
  m.w.resize(3);
  m.w << 0.3, -1.2, 2.0;
  m.w0 = 0.7;
  Eigen::VectorXd a(3), b(3);
  a << 1, 2, 3;
  b << -1, 0.5, 2;
  CHECK(mil::decision(m, a) + mil::decision(m, b) - m.w0 ==
        doctest::Approx(mil::decision(m, Eigen::VectorXd(a + b))).epsilon(1e-12));
}

TEST_CASE("decision: dimension mismatch is rejected") {
  mil::LinearModel m;
  m.w = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(mil::decision(m, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("decisions: batch version matches the scalar one") {
  mil::LinearModel m;
  m.w.resize(2);
  m.w << 1.5, -0.5;
  m.w0 = 0.25;
  Eigen::MatrixXd X(3, 2);
  X << 1, 2, 0, 0, -1, 4;
  const Eigen::VectorXd out = mil::decisions(m, X);
  for (Eigen::Index i = 0; i < 3; ++i)
    CHECK(out[i] == mil::decision(m, X.row(i).transpose()));
}

// ---------------------------------------------------------------------------
// Gradients against central finite differences
// ---------------------------------------------------------------------------

TEST_CASE("gradients: match central differences for both losses") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> param(-1.5, 1.5);
  const double step = 1e-5;

  for (mil::LossKind loss : {mil::LossKind::hinge, mil::LossKind::logistic}) {
    for (int t = 0; t < 10; ++t) {
      const Toy toy = random_problem(rng, 8, 3);
      const double lambda = 0.5;
      Eigen::VectorXd w(3);
      for (int j = 0; j < 3; ++j) w[j] = param(rng);
      const double w0 = param(rng);

      Eigen::VectorXd grad_w;
      double grad_w0 = 0.0;
      mil::linear_gradient(toy.X, toy.y, loss, lambda, w, w0, grad_w, grad_w0);

      auto objective = [&](const Eigen::VectorXd& ww, double b) {
        return mil::linear_objective(toy.X, toy.y, loss, mil::RegKind::l2, lambda, ww, b);
      };

      for (int j = 0; j < 3; ++j) {
        Eigen::VectorXd up = w, down = w;
        up[j] += step;
        down[j] -= step;
        const double numeric = (objective(up, w0) - objective(down, w0)) / (2 * step);
        const double scale = std::max({1.0, std::abs(numeric), std::abs(grad_w[j])});
        CHECK(std::abs(grad_w[j] - numeric) / scale < 1e-4);
      }
      const double numeric0 = (objective(w, w0 + step) - objective(w, w0 - step)) / (2 * step);
      const double scale0 = std::max({1.0, std::abs(numeric0), std::abs(grad_w0)});
      CHECK(std::abs(grad_w0 - numeric0) / scale0 < 1e-4);
    }
  }
}

TEST_CASE("objective: l1 penalty uses the absolute-value norm") {
  const Toy t = two_point_toy();
  Eigen::VectorXd w(1);
  w << -2.0;
  const double l2 = mil::linear_objective(t.X, t.y, mil::LossKind::hinge, mil::RegKind::l2, 0.5,
                                          w, 0.0);
  const double l1 = mil::linear_objective(t.X, t.y, mil::LossKind::hinge, mil::RegKind::l1, 0.5,
                                          w, 0.0);
  CHECK(l2 - l1 == doctest::Approx(0.5 * (4.0 - 2.0)));  // lambda (w^2 - |w|)
}

// ---------------------------------------------------------------------------
// Training against the grid-search reference
// ---------------------------------------------------------------------------

TEST_CASE("svm training: separates the two-point problem and reaches the grid optimum") {
  const Toy t = two_point_toy();
  mil::TrainConfig cfg;
  cfg.lambda = 1.0;
  const mil::LinearModel model = mil::train_linear_svm(t.X, t.y, cfg);

  CHECK(mil::decision(model, t.X.row(0).transpose()) < 0.0);
  CHECK(mil::decision(model, t.X.row(1).transpose()) > 0.0);

  const double trained = mil::linear_objective(t.X, t.y, mil::LossKind::hinge, mil::RegKind::l2,
                                               1.0, model.w, model.w0);
  const double reference = grid_search_min_objective(t, mil::LossKind::hinge, 1.0);
  CHECK(trained <= reference + 1e-3);
}

TEST_CASE("logistic training: separable single-feature problem reaches the grid optimum") {
  Toy t;
  t.X.resize(4, 1);
  t.X << -2, -1, 1, 2;
  t.y.resize(4);
  t.y << -1, -1, 1, 1;
  mil::TrainConfig cfg;
  cfg.lambda = 1.0;
  const mil::LinearModel model = mil::train_logistic(t.X, t.y, cfg);

  CHECK(model.w.allFinite());  // the regularizer keeps separable weights finite
  const double trained = mil::linear_objective(t.X, t.y, mil::LossKind::logistic,
                                               mil::RegKind::l2, 1.0, model.w, model.w0);
  const double reference = grid_search_min_objective(t, mil::LossKind::logistic, 1.0);
  CHECK(trained <= reference + 1e-3);
}

TEST_CASE("logistic training: symmetric two-point problem centers the bias at zero") {
  const Toy t = two_point_toy();
  mil::TrainConfig cfg;
  cfg.lambda = 1.0;
  const mil::LinearModel model = mil::train_logistic(t.X, t.y, cfg);
  CHECK(std::abs(model.w0) < 1e-6);
}

TEST_CASE("training: gradient norm at the returned optimum is tiny") {
  std::mt19937_64 rng(55);
  const Toy t = random_problem(rng, 12, 2);
  mil::TrainConfig cfg;
  cfg.lambda = 0.1;
  cfg.max_iters = 2000;
  for (mil::LossKind loss : {mil::LossKind::hinge, mil::LossKind::logistic}) {
    const mil::LinearModel model = mil::train_linear(t.X, t.y, loss, cfg);
    Eigen::VectorXd grad_w;
    double grad_w0 = 0.0;
    mil::linear_gradient(t.X, t.y, loss, cfg.lambda, model.w, model.w0, grad_w, grad_w0);
    const double norm = std::sqrt(grad_w.squaredNorm() + grad_w0 * grad_w0);
    CHECK(norm < 1e-5);
  }
}

TEST_CASE("training: beats the best zero-weight model") {
  std::mt19937_64 rng(77);
  const Toy t = random_problem(rng, 10, 2);
  mil::TrainConfig cfg;
  cfg.lambda = 0.3;
  const mil::LinearModel model = mil::train_linear_svm(t.X, t.y, cfg);
  const double trained = mil::linear_objective(t.X, t.y, mil::LossKind::hinge, mil::RegKind::l2,
                                               cfg.lambda, model.w, model.w0);

  double zero_best = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd w0vec = Eigen::VectorXd::Zero(2);
  for (int bi = -3000; bi <= 3000; ++bi)
    zero_best = std::min(zero_best, mil::linear_objective(t.X, t.y, mil::LossKind::hinge,
                                                          mil::RegKind::l2, cfg.lambda, w0vec,
                                                          bi * 0.001));
  CHECK(trained <= zero_best + 1e-9);
}

TEST_CASE("training: duplicating every row leaves the optimum unchanged") {
  std::mt19937_64 rng(88);
  const Toy t = random_problem(rng, 8, 2);
  Toy doubled;
  doubled.X.resize(16, 2);
  doubled.X << t.X, t.X;
  doubled.y.resize(16);
  doubled.y << t.y, t.y;

  mil::TrainConfig cfg;
  cfg.lambda = 0.5;
  const mil::LinearModel a = mil::train_linear_svm(t.X, t.y, cfg);
  const mil::LinearModel b = mil::train_linear_svm(doubled.X, doubled.y, cfg);

  // The objective averages the loss, so both problems share their minimizer.
  CHECK((a.w - b.w).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(std::abs(a.w0 - b.w0) < 1e-5);
  const double obj_a = mil::linear_objective(t.X, t.y, mil::LossKind::hinge, mil::RegKind::l2,
                                             cfg.lambda, a.w, a.w0);
  const double obj_b = mil::linear_objective(t.X, t.y, mil::LossKind::hinge, mil::RegKind::l2,
                                             cfg.lambda, b.w, b.w0);
  CHECK(std::abs(obj_a - obj_b) < 1e-10);
}

TEST_CASE("training: huge regularization collapses the weights") {
  std::mt19937_64 rng(99);
  const Toy t = random_problem(rng, 10, 2);

  mil::TrainConfig strong;
  strong.lambda = 1e6;
  const mil::LinearModel shrunk = mil::train_linear_svm(t.X, t.y, strong);
  CHECK(shrunk.w.norm() < 1e-3);
  // Decisions flatten to (nearly) the bias alone.
  const Eigen::VectorXd scores = mil::decisions(shrunk, t.X);
  CHECK((scores.array() - shrunk.w0).abs().maxCoeff() < 1e-2);

  // The minimized objective is non-decreasing in the trade-off parameter.
  double previous = -std::numeric_limits<double>::infinity();
  for (double lambda : {0.01, 0.1, 1.0, 10.0, 1e6}) {
    mil::TrainConfig cfg;
    cfg.lambda = lambda;
    const mil::LinearModel m = mil::train_linear_svm(t.X, t.y, cfg);
    const double obj = mil::linear_objective(t.X, t.y, mil::LossKind::hinge, mil::RegKind::l2,
                                             lambda, m.w, m.w0);
    CHECK(obj >= previous - 1e-9);
    previous = obj;
  }
}

TEST_CASE("training: identical inputs give bit-identical models") {
  std::mt19937_64 rng(111);
  const Toy t = random_problem(rng, 10, 3);
  mil::TrainConfig cfg;
  const mil::LinearModel a = mil::train_linear_svm(t.X, t.y, cfg);
  const mil::LinearModel b = mil::train_linear_svm(t.X, t.y, cfg);
  REQUIRE(a.w.size() == b.w.size());
  CHECK(std::memcmp(a.w.data(), b.w.data(), sizeof(double) * a.w.size()) == 0);
  CHECK(std::memcmp(&a.w0, &b.w0, sizeof(double)) == 0);
}

TEST_CASE("training: sparse variant zeroes weights under a strong l1 penalty") {
  std::mt19937_64 rng(123);
  const Toy t = random_problem(rng, 10, 3);
  mil::TrainConfig cfg;
  cfg.reg = mil::RegKind::l1;
  cfg.lambda = 100.0;
  cfg.max_iters = 2000;
  const mil::LinearModel m = mil::train_linear_svm(t.X, t.y, cfg);
  CHECK(m.w.cwiseAbs().maxCoeff() == 0.0);  // soft-thresholding gives exact zeros
  CHECK(m.reg == mil::RegKind::l1);
}

TEST_CASE("training: invalid inputs are rejected") {
  const Toy t = two_point_toy();
  mil::TrainConfig cfg;

  SUBCASE("single class") {
    Eigen::VectorXd y(2);
    y << 1, 1;
    CHECK_THROWS_AS(mil::train_linear_svm(t.X, y, cfg), std::invalid_argument);
  }
  SUBCASE("label outside {-1,+1}") {
    Eigen::VectorXd y(2);
    y << 0, 1;
    CHECK_THROWS_AS(mil::train_linear_svm(t.X, y, cfg), std::invalid_argument);
  }
  SUBCASE("non-finite feature") {
    Eigen::MatrixXd X = t.X;
    X(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(mil::train_linear_svm(X, t.y, cfg), std::invalid_argument);
  }
  SUBCASE("bad lambda") {
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(mil::train_linear_svm(t.X, t.y, cfg), std::invalid_argument);
  }
  SUBCASE("row/label mismatch") {
    Eigen::VectorXd y(3);
    y << -1, 1, 1;
    CHECK_THROWS_AS(mil::train_linear_svm(t.X, y, cfg), std::invalid_argument);
  }
}

// ---------------------------------------------------------------------------
// Score normalization
// ---------------------------------------------------------------------------

TEST_CASE("posteriors: min-max fixtures") {
  Eigen::VectorXd s(3);
  s << -1, 0, 1;
  const Eigen::VectorXd p = mil::scores_to_posteriors(s);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 0.5);
  CHECK(p[2] == 1.0);
}

TEST_CASE("posteriors: all-equal scores map to one half") {
  const Eigen::VectorXd p = mil::scores_to_posteriors(Eigen::VectorXd::Constant(3, 5.0));
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(p[i] == 0.5);
}

TEST_CASE("posteriors: monotone and invariant to positive affine rescaling") {
  Eigen::VectorXd s(5);
  s << 0.3, -2.0, 1.7, 0.0, 0.9;
  const Eigen::VectorXd p = mil::scores_to_posteriors(s);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j)
      if (s[i] < s[j]) CHECK(p[i] < p[j]);

  const Eigen::VectorXd q = mil::scores_to_posteriors(Eigen::VectorXd(3.0 * s.array() + 7.0));
  CHECK((p - q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(p.minCoeff() == 0.0);
  CHECK(p.maxCoeff() == 1.0);
}
