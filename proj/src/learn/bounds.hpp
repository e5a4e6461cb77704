#pragma once

#include <map>
#include <string>

namespace lab::learn {

/// An evaluated sample-complexity expression. All bounds use the natural
/// logarithm; `value` is the ceiling of the exact real expression, never
/// below 1.
struct SampleBound {
  std::string formula;
  std::map<std::string, double> params;
  long long value = 1;
};

/// Votes needed so the majority is the clean label w.p. >= 1 - delta1:
/// m > 8(1-eta)/(1-2eta)^2 * log(1/delta1).
SampleBound bound_majority(double eta, double delta1);

/// Draws needed so every support interval holds >= k samples w.p. >= 1 - delta2:
/// m > 2|zeta|^2 k + 2|zeta|^2 log(|zeta|/delta2).
SampleBound bound_minwt(int zeta_size, int min_count, double delta2);

/// Draws after which every infected ball holds a mislabelled sample w.p. >= 1 - delta:
/// m >= (|zeta| / (eta c2)) log(|zeta|/delta).
SampleBound bound_infected(int zeta_size, double eta, double c2, double delta);

/// The two-branch bound for the interval-parity duel, with |zeta| = 2n:
/// max{ 2|zeta|^2 log(2|zeta|/delta)(8(1-eta)/(1-2eta)^2 + 1),
///      (0.1|zeta| / (eta gamma^2)) log(0.1|zeta| / (gamma delta)) }.
SampleBound bound_thm3(int bit_width, double eta, double gamma, double delta);

}  // namespace lab::learn
