#include "risk/attack.hpp"

#include <cmath>

#include "core/error.hpp"

namespace lab::risk {

void validate(const AttackConfig& cfg) {
  require(cfg.gamma >= 0.0, errc::invalid_argument, "AttackConfig: gamma must be >= 0");
  require(cfg.steps >= 0, errc::invalid_argument, "AttackConfig: steps must be >= 0");
  require(cfg.steps == 0 || cfg.step_size > 0.0, errc::invalid_argument,
          "AttackConfig: step_size must be positive when stepping");
  require(cfg.restarts >= 1, errc::invalid_argument, "AttackConfig: restarts must be >= 1");
}

namespace {

void project(const Eigen::MatrixXd& origin, Eigen::MatrixXd& x, Norm norm, double gamma) {
  if (norm == Norm::sup) {
    x = x.array().max(origin.array() - gamma).min(origin.array() + gamma).matrix();
  } else {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      Eigen::RowVectorXd d = x.row(i) - origin.row(i);
      double len = d.norm();
      if (len > gamma) x.row(i) = origin.row(i) + d * (gamma / len);
    }
  }
}

Eigen::MatrixXd random_start_offset(Eigen::Index rows, Eigen::Index cols, Norm norm, double gamma,
                                    Rng& rng) {
  Eigen::MatrixXd off(rows, cols);
  if (norm == Norm::sup) {
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) off(i, j) = gamma * (2.0 * rng.next_double() - 1.0);
  } else {
    // Uniform in the L2 ball: gaussian direction, radius gamma * u^(1/d).
    for (Eigen::Index i = 0; i < rows; ++i) {
      Eigen::RowVectorXd g(cols);
      for (Eigen::Index j = 0; j < cols; ++j) g(j) = rng.next_normal();
      double len = g.norm();
      if (len == 0.0) len = 1.0;
      double radius = gamma * std::pow(rng.next_double(), 1.0 / static_cast<double>(cols));
      off.row(i) = g * (radius / len);
    }
  }
  return off;
}

}  // namespace

Eigen::MatrixXd pgd_attack_batch(const nn::Mlp& net, const Eigen::MatrixXd& inputs,
                                 const std::vector<int>& labels, const AttackConfig& cfg) {
  validate(cfg);
  if (cfg.gamma == 0.0) return inputs;

  Eigen::MatrixXd best;
  Eigen::VectorXd best_loss;
  Rng rng(cfg.seed);

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Eigen::MatrixXd x = inputs;
    if (cfg.random_start)
      x += random_start_offset(inputs.rows(), inputs.cols(), cfg.norm, cfg.gamma, rng);

    Eigen::VectorXd loss = nn::per_sample_loss(net, x, labels);
    if (restart == 0) {
      best = x;
      best_loss = loss;
    } else {
      for (Eigen::Index i = 0; i < loss.size(); ++i)
        if (loss(i) > best_loss(i)) {
          best_loss(i) = loss(i);
          best.row(i) = x.row(i);
        }
    }

    for (int step = 0; step < cfg.steps; ++step) {
      Eigen::MatrixXd grad = nn::input_grad_batch(net, x, labels);
      if (cfg.norm == Norm::sup) {
        x += cfg.step_size * grad.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
      } else {
        for (Eigen::Index i = 0; i < grad.rows(); ++i) {
          double len = grad.row(i).norm();
          if (len > 0.0) x.row(i) += cfg.step_size / len * grad.row(i);
        }
      }
      project(inputs, x, cfg.norm, cfg.gamma);
      loss = nn::per_sample_loss(net, x, labels);
      for (Eigen::Index i = 0; i < loss.size(); ++i)
        if (loss(i) > best_loss(i)) {
          best_loss(i) = loss(i);
          best.row(i) = x.row(i);
        }
    }
  }

  // Ball-containment invariant, checked on every call.
  for (Eigen::Index i = 0; i < best.rows(); ++i) {
    Eigen::RowVectorXd d = best.row(i) - inputs.row(i);
    double dist = cfg.norm == Norm::sup ? d.cwiseAbs().maxCoeff() : d.norm();
    require(dist <= cfg.gamma * (1.0 + 1e-9) + 1e-15, errc::precondition,
            "pgd_attack: iterate escaped the gamma ball");
  }
  return best;
}

std::vector<double> pgd_attack(const nn::Mlp& net, const Point& x, int label,
                               const AttackConfig& cfg) {
  Eigen::MatrixXd one(1, x.dim());
  for (int j = 0; j < x.dim(); ++j) one(0, j) = x[static_cast<std::size_t>(j)];
  Eigen::MatrixXd adv = pgd_attack_batch(net, one, {label}, cfg);
  return std::vector<double>(adv.data(), adv.data() + adv.cols());
}

}  // namespace lab::risk
