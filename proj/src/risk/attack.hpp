#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"
#include "nn/mlp.hpp"

namespace lab::risk {

enum class Norm { sup, euclidean };

/// PGD parameters. gamma is the perturbation radius under `norm`.
struct AttackConfig {
  Norm norm = Norm::sup;
  double gamma = 0.0;
  int steps = 0;
  double step_size = 0.01;
  bool random_start = false;
  int restarts = 1;
  Seed seed{0};  // only used when random_start is set
};

void validate(const AttackConfig& cfg);

/// Iterative loss ascent projected back into the gamma ball around each row
/// of `inputs`. Sup-norm: signed-gradient steps clipped to the box; euclidean:
/// normalized-gradient steps, radial projection. Returns the max-loss iterate
/// seen per sample across all steps and restarts; the output always stays
/// inside the gamma ball.
Eigen::MatrixXd pgd_attack_batch(const nn::Mlp& net, const Eigen::MatrixXd& inputs,
                                 const std::vector<int>& labels, const AttackConfig& cfg);

std::vector<double> pgd_attack(const nn::Mlp& net, const Point& x, int label,
                               const AttackConfig& cfg);

}  // namespace lab::risk
