#include "learn/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace lab::learn {

namespace {
long long ceil_at_least_one(double v) {
  double c = std::ceil(v);
  if (!(c >= 1.0)) return 1;
  return static_cast<long long>(c);
}
}  // namespace

SampleBound bound_majority(double eta, double delta1) {
  require(eta >= 0.0 && eta < 0.5, errc::invalid_argument, "bound_majority: eta must be in [0, 1/2)");
  require(delta1 > 0.0 && delta1 < 1.0, errc::invalid_argument, "bound_majority: delta1 must be in (0,1)");
  double v = 8.0 * (1.0 - eta) / ((1.0 - 2.0 * eta) * (1.0 - 2.0 * eta)) * std::log(1.0 / delta1);
  return {"majority", {{"eta", eta}, {"delta1", delta1}}, ceil_at_least_one(v)};
}

SampleBound bound_minwt(int zeta_size, int min_count, double delta2) {
  require(zeta_size >= 1, errc::invalid_argument, "bound_minwt: zeta size must be >= 1");
  require(min_count >= 0, errc::invalid_argument, "bound_minwt: per-interval count must be >= 0");
  require(delta2 > 0.0 && delta2 < 1.0, errc::invalid_argument, "bound_minwt: delta2 must be in (0,1)");
  double z = zeta_size;
  double v = 2.0 * z * z * min_count + 2.0 * z * z * std::log(z / delta2);
  return {"minwt",
          {{"zeta", z}, {"k", static_cast<double>(min_count)}, {"delta2", delta2}},
          ceil_at_least_one(v)};
}

SampleBound bound_infected(int zeta_size, double eta, double c2, double delta) {
  require(zeta_size >= 1, errc::invalid_argument, "bound_infected: zeta size must be >= 1");
  require(eta > 0.0 && eta <= 1.0, errc::invalid_argument, "bound_infected: eta must be in (0, 1]");
  require(c2 > 0.0, errc::invalid_argument, "bound_infected: c2 must be positive");
  require(delta > 0.0 && delta < 1.0, errc::invalid_argument, "bound_infected: delta must be in (0,1)");
  double z = zeta_size;
  double v = z / (eta * c2) * std::log(z / delta);
  return {"infected", {{"zeta", z}, {"eta", eta}, {"c2", c2}, {"delta", delta}}, ceil_at_least_one(v)};
}

SampleBound bound_thm3(int bit_width, double eta, double gamma, double delta) {
  require(bit_width >= 1, errc::invalid_argument, "bound_thm3: bit width must be >= 1");
  require(eta > 0.0 && eta < 0.5, errc::invalid_argument, "bound_thm3: eta must be in (0, 1/2)");
  require(gamma > 0.0, errc::invalid_argument, "bound_thm3: gamma must be positive");
  require(delta > 0.0 && delta < 1.0, errc::invalid_argument, "bound_thm3: delta must be in (0,1)");
  double z = 2.0 * bit_width;
  double majority_branch = 2.0 * z * z * std::log(2.0 * z / delta) *
                           (8.0 * (1.0 - eta) / ((1.0 - 2.0 * eta) * (1.0 - 2.0 * eta)) + 1.0);
  double infection_branch = 0.1 * z / (eta * gamma * gamma) * std::log(0.1 * z / (gamma * delta));
  return {"thm3",
          {{"n", static_cast<double>(bit_width)}, {"eta", eta}, {"gamma", gamma}, {"delta", delta}},
          ceil_at_least_one(std::max(majority_branch, infection_branch))};
}

}  // namespace lab::learn
