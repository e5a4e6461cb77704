#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "core/types.hpp"
#include "dist/models.hpp"
#include "learn/hypotheses.hpp"
#include "nn/mlp.hpp"
#include "risk/attack.hpp"
#include "risk/region1.hpp"

namespace lab::risk {

/// (natural, adversarial) risk pair with the evaluation route that produced it.
struct RiskReport {
  std::string method;  // exact-interval | exact-geometry | grid | pgd-empirical | monte-carlo
  double gamma = 0.0;
  double natural = 0.0;
  double adversarial = 0.0;
  std::size_t n_eval = 0;
  int resolution = 0;
  std::uint64_t seed = 0;
};

RiskReport make_report(std::string method, double gamma, double natural, double adversarial,
                       std::size_t n_eval, int resolution, std::uint64_t seed);

std::string risk_report_csv_header();
std::string to_csv_row(const RiskReport& r);

using Predictor = std::function<int(const Point&)>;

/// Misclassified fraction on a test set.
double natural_risk(const Predictor& predict, const TrainView& test);

/// Exact interval-parity risks, by Lebesgue measure on the support: a point
/// is vulnerable when its own prediction is wrong or any point within gamma
/// predicts differently from its true label.
double exact_adv_risk_interval(const Region1& predicts_one, const dist::IntervalParityModel& model,
                               double gamma);
double exact_adv_risk_interval(const learn::UnionOfIntervals& h,
                               const dist::IntervalParityModel& model, double gamma);
double exact_adv_risk_interval(const learn::ParityHypothesis& h,
                               const dist::IntervalParityModel& model, double gamma);
double exact_adv_risk_interval(const learn::LinearClassifier& h,
                               const dist::IntervalParityModel& model, double gamma);
double exact_adv_risk_interval(const learn::NearestNeighbor& h,
                               const dist::IntervalParityModel& model, double gamma);

/// Fraction of a disk's area cut off by a chord at height h from the rim,
/// h expressed as a fraction of the radius in [0, 2].
double circular_segment_fraction(double h_over_r);

/// Exact natural risk of a linear separator on the parity-ball model: mean
/// over support balls of the wrong-side disk fraction (L2 geometry).
double exact_natural_risk_parity_balls(const learn::LinearClassifier& h,
                                       const dist::ParityBallModel& model);
double exact_natural_risk_parity_balls(const learn::ParityHypothesis& h,
                                       const dist::ParityBallModel& model);

/// Exact adversarial risk under an L2 perturbation of radius gamma, defined
/// only for hypotheses with zero natural risk on the model (the geometry
/// argument needs every ball on the correct side).
double exact_adv_risk_parity_balls(const learn::LinearClassifier& h,
                                   const dist::ParityBallModel& model, double gamma);
double exact_adv_risk_parity_balls(const learn::ParityHypothesis& h,
                                   const dist::ParityBallModel& model, double gamma);

/// Brute-force 2-D oracle: a test point is vulnerable when any lattice point
/// of the gamma ball, at (2*resolution+1)^2 granularity, is predicted
/// differently from its label. A lower bound on the true adversarial risk.
double grid_adv_risk(const Predictor& predict, const TrainView& eval_set, double gamma, Norm norm,
                     int resolution, int threads = 1);

/// How a fine-class net turns logits into a coarse prediction: summing the
/// group's logits (the differentiable pipeline) or mapping the argmax class.
enum class Aggregate { none, logit_sum, argmax_map };

double grid_adv_risk(const nn::Mlp& net, const TrainView& eval_set, double gamma, Norm norm,
                     int resolution, Aggregate mode = Aggregate::none,
                     const nn::CoarseMap* map = nullptr);

/// PGD-measured adversarial error: fraction of points where the attack output
/// (or the clean point itself) is misclassified.
double empirical_adv_risk(const nn::Mlp& net, const TrainView& test, const AttackConfig& cfg);

}  // namespace lab::risk
