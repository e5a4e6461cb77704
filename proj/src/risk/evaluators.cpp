#include "risk/evaluators.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace lab::risk {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
}

RiskReport make_report(std::string method, double gamma, double natural, double adversarial,
                       std::size_t n_eval, int resolution, std::uint64_t seed) {
  require(natural >= 0.0 && natural <= 1.0, errc::invalid_argument, "RiskReport: natural outside [0,1]");
  require(adversarial >= 0.0 && adversarial <= 1.0, errc::invalid_argument,
          "RiskReport: adversarial outside [0,1]");
  require(adversarial >= natural - 1e-12, errc::invalid_argument,
          "RiskReport: adversarial risk below natural risk");
  return RiskReport{std::move(method), gamma, natural, adversarial, n_eval, resolution, seed};
}

std::string risk_report_csv_header() { return "method,gamma,natural,adversarial,n_eval,resolution,seed"; }

std::string to_csv_row(const RiskReport& r) {
  std::string row = r.method;
  row += ',';
  row += format_double(r.gamma);
  row += ',';
  row += format_double(r.natural);
  row += ',';
  row += format_double(r.adversarial);
  row += ',';
  row += std::to_string(r.n_eval);
  row += ',';
  row += std::to_string(r.resolution);
  row += ',';
  row += std::to_string(r.seed);
  return row;
}

double natural_risk(const Predictor& predict, const TrainView& test) {
  require(!test.empty(), errc::invalid_argument, "natural_risk: empty test set");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < test.size(); ++i) wrong += predict(test.x(i)) != test.y(i) ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(test.size());
}

double exact_adv_risk_interval(const Region1& predicts_one, const dist::IntervalParityModel& model,
                               double gamma) {
  dist::validate(model);
  require(gamma >= 0.0, errc::invalid_argument, "exact_adv_risk_interval: gamma must be >= 0");

  const double top = static_cast<double>(std::int64_t(1) << model.bit_width);
  const double bound_lo = -gamma - 2.0;
  const double bound_hi = top + gamma + 2.0;

  // Union of support intervals per true label.
  std::vector<Region1::Piece> ones, zeros;
  for (std::int64_t j : model.centers) {
    Region1::Piece piece{static_cast<double>(j) - 0.25, static_cast<double>(j) + 0.25, true, true};
    if (dist::true_label_cs(model, static_cast<double>(j)) == 1)
      ones.push_back(piece);
    else
      zeros.push_back(piece);
  }
  Region1 support_one(std::move(ones));
  Region1 support_zero(std::move(zeros));

  // Points with true label y are vulnerable within gamma of the region where
  // the hypothesis outputs 1 - y.
  Region1 wrong_for_ones = predicts_one.complement(bound_lo, bound_hi).dilate(gamma);
  Region1 wrong_for_zeros = predicts_one.dilate(gamma);

  double vulnerable = support_one.intersect(wrong_for_ones).measure() +
                      support_zero.intersect(wrong_for_zeros).measure();
  double total = support_one.measure() + support_zero.measure();
  return std::clamp(vulnerable / total, 0.0, 1.0);
}

namespace {

double interval_bound_hi(const dist::IntervalParityModel& model) {
  return static_cast<double>(std::int64_t(1) << model.bit_width) + 1.0;
}

}  // namespace

double exact_adv_risk_interval(const learn::UnionOfIntervals& h,
                               const dist::IntervalParityModel& model, double gamma) {
  return exact_adv_risk_interval(decision_region_one(h), model, gamma);
}

double exact_adv_risk_interval(const learn::ParityHypothesis& h,
                               const dist::IntervalParityModel& model, double gamma) {
  return exact_adv_risk_interval(decision_region_one(h, -1.0, interval_bound_hi(model)), model, gamma);
}

double exact_adv_risk_interval(const learn::LinearClassifier& h,
                               const dist::IntervalParityModel& model, double gamma) {
  return exact_adv_risk_interval(decision_region_one(h, -1.0, interval_bound_hi(model)), model, gamma);
}

double exact_adv_risk_interval(const learn::NearestNeighbor& h,
                               const dist::IntervalParityModel& model, double gamma) {
  return exact_adv_risk_interval(decision_region_one(h, -1.0, interval_bound_hi(model)), model, gamma);
}

double circular_segment_fraction(double h_over_r) {
  require(h_over_r >= 0.0 && h_over_r <= 2.0, errc::out_of_range,
          "circular_segment_fraction: argument outside [0, 2]");
  double c = 1.0 - h_over_r;  // chord offset from the center, as a radius fraction
  double inside = 2.0 * h_over_r - h_over_r * h_over_r;
  double frac = (std::acos(c) - c * std::sqrt(std::max(0.0, inside))) / kPi;
  return std::clamp(frac, 0.0, 1.0);
}

namespace {

// Fraction of a radius-r disk lying beyond either of the lines |u1| = t,
// |u2| = t (the parity grid walls at local distance t from the center).
double beyond_walls_fraction(double r, double t) {
  if (t >= r) return 0.0;
  if (t <= 0.0) return 1.0;
  double seg = r * r * std::acos(t / r) - t * std::sqrt(r * r - t * t);
  double corner = 0.0;
  if (2.0 * t * t < r * r) {
    double s = std::sqrt(r * r - t * t);
    corner = 0.5 * r * r * (std::asin(s / r) - std::asin(t / r)) - t * s + t * t;
  }
  double area = 4.0 * seg - 4.0 * corner;
  return std::clamp(area / (kPi * r * r), 0.0, 1.0);
}

// Signed distance from each ball center to the separating line, positive on
// the ball's correct side.
std::vector<double> signed_margins(const learn::LinearClassifier& h,
                                   const dist::ParityBallModel& model) {
  learn::validate(h);
  require(h.w.size() == 2, errc::invalid_argument, "parity-ball evaluator: need a 2-D separator");
  double norm = std::sqrt(h.w[0] * h.w[0] + h.w[1] * h.w[1]);
  std::vector<double> margins;
  for (const auto& [center, label] : dist::parity_ball_centers(model)) {
    double score = h.score(center) / norm;
    margins.push_back(label == 1 ? score : -score);
  }
  return margins;
}

}  // namespace

double exact_natural_risk_parity_balls(const learn::LinearClassifier& h,
                                       const dist::ParityBallModel& model) {
  double total = 0.0;
  auto margins = signed_margins(h, model);
  for (double d : margins)
    total += circular_segment_fraction(std::clamp(model.radius - d, 0.0, 2.0 * model.radius) / model.radius);
  return total / static_cast<double>(margins.size());
}

double exact_adv_risk_parity_balls(const learn::LinearClassifier& h,
                                   const dist::ParityBallModel& model, double gamma) {
  require(gamma >= 0.0, errc::invalid_argument, "exact_adv_risk_parity_balls: gamma must be >= 0");
  auto margins = signed_margins(h, model);
  for (double d : margins)
    require(d >= model.radius, errc::precondition,
            "exact_adv_risk_parity_balls: separator has nonzero natural risk");
  double total = 0.0;
  for (double d : margins) {
    double height = std::clamp(model.radius + gamma - d, 0.0, 2.0 * model.radius);
    total += circular_segment_fraction(height / model.radius);
  }
  return total / static_cast<double>(margins.size());
}

double exact_natural_risk_parity_balls(const learn::ParityHypothesis& h,
                                       const dist::ParityBallModel& model) {
  dist::validate(model);
  require(h.planar, errc::invalid_argument, "parity-ball evaluator: need a planar parity hypothesis");
  require(model.radius <= 0.5, errc::precondition,
          "parity-ball evaluator: balls must stay inside their grid cells");
  // Constant on each cell: a ball is either fully right or fully wrong.
  std::size_t wrong = 0;
  auto centers = dist::parity_ball_centers(model);
  for (const auto& [center, label] : centers) wrong += h.predict(center) != label ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(centers.size());
}

double exact_adv_risk_parity_balls(const learn::ParityHypothesis& h,
                                   const dist::ParityBallModel& model, double gamma) {
  require(gamma >= 0.0, errc::invalid_argument, "exact_adv_risk_parity_balls: gamma must be >= 0");
  require(exact_natural_risk_parity_balls(h, model) == 0.0, errc::precondition,
          "exact_adv_risk_parity_balls: hypothesis has nonzero natural risk");
  // Decision boundaries are the half-integer grid lines, at distance 1/2 from
  // every center; the vulnerable mass of each ball is identical.
  return beyond_walls_fraction(model.radius, 0.5 - gamma);
}

double grid_adv_risk(const Predictor& predict, const TrainView& eval_set, double gamma, Norm norm,
                     int resolution, int threads) {
  require(!eval_set.empty(), errc::invalid_argument, "grid_adv_risk: empty eval set");
  require(eval_set.dim() == 2, errc::invalid_argument, "grid_adv_risk: eval set must be 2-D");
  require(gamma >= 0.0, errc::invalid_argument, "grid_adv_risk: gamma must be >= 0");
  require(resolution >= 0, errc::invalid_argument, "grid_adv_risk: resolution must be >= 0");

  const int res = (gamma == 0.0) ? 0 : resolution;
  const double tol = gamma * gamma * (1.0 + 1e-12);
  auto vulnerable_at = [&](std::size_t i) -> char {
    const Point& x = eval_set.x(i);
    const int y = eval_set.y(i);
    for (int a = -res; a <= res; ++a) {
      for (int b = -res; b <= res; ++b) {
        double dx = res == 0 ? 0.0 : gamma * a / res;
        double dy = res == 0 ? 0.0 : gamma * b / res;
        if (norm == Norm::euclidean && dx * dx + dy * dy > tol) continue;
        if (predict(Point{x[0] + dx, x[1] + dy}) != y) return 1;
      }
    }
    return 0;
  };

  std::vector<char> vulnerable(eval_set.size(), 0);
  const int workers = std::max(1, threads);
  if (workers == 1) {
    for (std::size_t i = 0; i < eval_set.size(); ++i) vulnerable[i] = vulnerable_at(i);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (eval_set.size() + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
    for (int w = 0; w < workers; ++w) {
      std::size_t begin = static_cast<std::size_t>(w) * chunk;
      std::size_t end = std::min(eval_set.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end] {
        for (std::size_t i = begin; i < end; ++i) vulnerable[i] = vulnerable_at(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::size_t count = 0;
  for (char v : vulnerable) count += static_cast<std::size_t>(v);
  return static_cast<double>(count) / static_cast<double>(eval_set.size());
}

double grid_adv_risk(const nn::Mlp& net, const TrainView& eval_set, double gamma, Norm norm,
                     int resolution, Aggregate mode, const nn::CoarseMap* map) {
  require(!eval_set.empty(), errc::invalid_argument, "grid_adv_risk: empty eval set");
  require(eval_set.dim() == 2 && net.input_dim() == 2, errc::invalid_argument,
          "grid_adv_risk: need 2-D inputs");
  require(gamma >= 0.0, errc::invalid_argument, "grid_adv_risk: gamma must be >= 0");
  require(resolution >= 0, errc::invalid_argument, "grid_adv_risk: resolution must be >= 0");
  require(mode == Aggregate::none || map != nullptr, errc::invalid_argument,
          "grid_adv_risk: aggregation needs a coarse map");
  if (mode != Aggregate::none) nn::validate(*map, net.output_dim());

  const int res = (gamma == 0.0) ? 0 : resolution;
  std::vector<std::pair<double, double>> offsets;
  const double tol = gamma * gamma * (1.0 + 1e-12);
  for (int a = -res; a <= res; ++a) {
    for (int b = -res; b <= res; ++b) {
      double dx = res == 0 ? 0.0 : gamma * a / res;
      double dy = res == 0 ? 0.0 : gamma * b / res;
      if (norm == Norm::euclidean && dx * dx + dy * dy > tol) continue;
      offsets.emplace_back(dx, dy);
    }
  }

  const std::size_t k = offsets.size();
  std::size_t count = 0;
  const std::size_t chunk_points = std::max<std::size_t>(1, 8192 / k);
  for (std::size_t start = 0; start < eval_set.size(); start += chunk_points) {
    std::size_t end = std::min(eval_set.size(), start + chunk_points);
    Eigen::MatrixXd batch(static_cast<Eigen::Index>((end - start) * k), 2);
    for (std::size_t i = start; i < end; ++i) {
      for (std::size_t o = 0; o < k; ++o) {
        auto row = static_cast<Eigen::Index>((i - start) * k + o);
        batch(row, 0) = eval_set.x(i)[0] + offsets[o].first;
        batch(row, 1) = eval_set.x(i)[1] + offsets[o].second;
      }
    }
    Eigen::MatrixXd logits = net.forward_batch(batch);
    if (mode == Aggregate::logit_sum) logits = nn::aggregate_fine_to_coarse(logits, *map);
    for (std::size_t i = start; i < end; ++i) {
      bool vulnerable = false;
      for (std::size_t o = 0; o < k && !vulnerable; ++o) {
        auto row = static_cast<Eigen::Index>((i - start) * k + o);
        Eigen::Index arg = 0;
        logits.row(row).maxCoeff(&arg);
        int predicted = static_cast<int>(arg);
        if (mode == Aggregate::argmax_map)
          predicted = map->fine_to_coarse[static_cast<std::size_t>(predicted)];
        vulnerable = predicted != eval_set.y(i);
      }
      count += vulnerable ? 1 : 0;
    }
  }
  return static_cast<double>(count) / static_cast<double>(eval_set.size());
}

double empirical_adv_risk(const nn::Mlp& net, const TrainView& test, const AttackConfig& cfg) {
  require(!test.empty(), errc::invalid_argument, "empirical_adv_risk: empty test set");
  validate(cfg);

  Eigen::MatrixXd inputs = nn::dataset_matrix(test);
  std::vector<int> labels = nn::dataset_labels(test);

  Eigen::MatrixXd clean_logits = net.forward_batch(inputs);
  Eigen::MatrixXd adv = pgd_attack_batch(net, inputs, labels, cfg);
  Eigen::MatrixXd adv_logits = net.forward_batch(adv);

  std::size_t vulnerable = 0;
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    Eigen::Index clean_arg = 0, adv_arg = 0;
    clean_logits.row(i).maxCoeff(&clean_arg);
    adv_logits.row(i).maxCoeff(&adv_arg);
    int y = labels[static_cast<std::size_t>(i)];
    vulnerable += (static_cast<int>(clean_arg) != y || static_cast<int>(adv_arg) != y) ? 1 : 0;
  }
  return static_cast<double>(vulnerable) / static_cast<double>(test.size());
}

}  // namespace lab::risk
