#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/noise.hpp"
#include "dist/models.hpp"
#include "learn/learners.hpp"
#include "nn/train.hpp"
#include "risk/evaluators.hpp"
#include "risk/region1.hpp"

using namespace lab;
using namespace lab::risk;

namespace {

// Brute-force membership model of a region built from closed intervals, used
// to cross-check the algebra.
struct BruteRegion {
  std::vector<std::pair<double, double>> closed;

  bool contains(double x) const {
    for (auto [lo, hi] : closed)
      if (x >= lo && x <= hi) return true;
    return false;
  }
};

learn::UnionOfIntervals closed_union(const std::vector<std::pair<double, double>>& ivals) {
  learn::UnionOfIntervals h;
  for (auto [lo, hi] : ivals) h.intervals.push_back({lo, hi, false, false});
  return h;
}

}  // namespace

TEST_CASE("region algebra agrees with pointwise brute force") {
  Rng rng(Seed{314});
  for (int rep = 0; rep < 200; ++rep) {
    // Random disjoint closed intervals in [0, 10].
    BruteRegion brute;
    double cursor = 0.0;
    std::vector<Region1::Piece> pieces;
    while (cursor < 9.0) {
      double lo = cursor + 0.05 + rng.next_double();
      double hi = lo + 0.05 + rng.next_double();
      if (hi > 10.0) break;
      brute.closed.emplace_back(lo, hi);
      pieces.push_back({lo, hi, false, false});
      cursor = hi + 0.05;
    }
    if (brute.closed.empty()) continue;
    Region1 region(pieces);
    double gamma = 0.3 * rng.next_double();

    Region1 complement = region.complement(0.0, 10.0);
    Region1 dilated = region.dilate(gamma);
    Region1 meet = region.intersect(Region1::segment(2.0, 8.0));

    for (int probe = 0; probe < 400; ++probe) {
      double x = 10.0 * rng.next_double();
      bool inside = brute.contains(x);
      CHECK(region.contains(x) == inside);
      if (std::fabs(x) > 1e-9 && std::fabs(x - 10.0) > 1e-9) {
        // Boundary points differ by openness; probe interior points only.
        bool on_edge = false;
        for (auto [lo, hi] : brute.closed)
          on_edge |= std::fabs(x - lo) < 1e-9 || std::fabs(x - hi) < 1e-9;
        if (!on_edge) CHECK(complement.contains(x) == !inside);
      }
      bool near = false;
      for (auto [lo, hi] : brute.closed) near |= x >= lo - gamma && x <= hi + gamma;
      CHECK(dilated.contains(x) == near);
      CHECK(meet.contains(x) == (inside && x >= 2.0 && x <= 8.0));
    }

    // Measure against a Riemann sum.
    double step = 1e-3;
    double riemann = 0.0;
    for (double x = step / 2; x < 10.0; x += step) riemann += brute.contains(x) ? step : 0.0;
    CHECK(region.measure() == doctest::Approx(riemann).epsilon(0.01));
  }
}

TEST_CASE("region union merges touching pieces and keeps holes") {
  Region1 left({{0.0, 1.0, false, true}});
  Region1 right({{1.0, 2.0, true, false}});
  Region1 joined = left.unite(right);
  REQUIRE(joined.pieces().size() == 2);  // the shared endpoint is open on both sides
  CHECK_FALSE(joined.contains(1.0));
  CHECK(joined.measure() == doctest::Approx(2.0));

  Region1 closing({{1.0, 1.0, false, false}});
  Region1 sealed = joined.unite(closing);
  REQUIRE(sealed.pieces().size() == 1);
  CHECK(sealed.contains(1.0));
}

TEST_CASE("natural risk basics") {
  Dataset test = Dataset({{Point{0.0}, 0, false}, {Point{1.0}, 1, false}}, 1, 2);
  CHECK(natural_risk([](const Point&) { return 0; }, test) == doctest::Approx(0.5));
  auto perfect = [](const Point& x) { return x[0] > 0.5 ? 1 : 0; };
  CHECK(natural_risk(perfect, test) == 0.0);
  auto complement = [&](const Point& x) { return 1 - perfect(x); };
  CHECK(natural_risk(complement, test) == 1.0);
}

TEST_CASE("exact interval risk on the single-interval example") {
  dist::IntervalParityModel model = dist::make_interval_parity(1, {0}, {1});
  learn::UnionOfIntervals h = closed_union({{0.75, 1.25}});
  CHECK(exact_adv_risk_interval(h, model, 0.0) == doctest::Approx(0.0));
  CHECK(exact_adv_risk_interval(h, model, 0.1) == doctest::Approx(0.4));
  // Two strips of width 0.1 inside a support of mass 0.5.
}

TEST_CASE("exact interval risk reduces to natural risk at gamma zero") {
  dist::IntervalParityModel model = dist::make_interval_parity(3, {0, 1}, {1, 2, 4, 6});
  // Mislabel the interval at 4 entirely: predicts 1 there although c_S(4)=0.
  learn::UnionOfIntervals h = closed_union({{3.75, 4.25}});
  double natural = exact_adv_risk_interval(h, model, 0.0);
  // c_S: 1 -> 1, 2 -> 1, 4 -> 0, 6 -> 1. h misses the three 1-intervals and
  // wrongly covers the 0-interval: all four intervals wrong.
  CHECK(natural == doctest::Approx(1.0));
  learn::UnionOfIntervals good = closed_union({{0.75, 1.25}, {1.75, 2.25}, {5.75, 6.25}});
  CHECK(exact_adv_risk_interval(good, model, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("point intervals are invisible at gamma zero but infect under attack") {
  dist::IntervalParityModel model = dist::make_interval_parity(2, {0}, {1, 2});
  // c_S: 1 -> 1, 2 -> 0. Correct base hypothesis.
  learn::UnionOfIntervals base = closed_union({{0.5, 1.5}});
  learn::UnionOfIntervals patched = base;
  patched.intervals.push_back({2.1, 2.1, false, false});  // stray 1 inside the 0-interval

  CHECK(exact_adv_risk_interval(base, model, 0.0) == doctest::Approx(0.0));
  CHECK(exact_adv_risk_interval(patched, model, 0.0) == doctest::Approx(0.0));

  double gamma = 0.05;
  double base_risk = exact_adv_risk_interval(base, model, gamma);
  double patched_risk = exact_adv_risk_interval(patched, model, gamma);
  CHECK(base_risk == doctest::Approx(0.0));
  // The point infects 2.1 +- 0.05 within the support interval (1.75, 2.25).
  CHECK(patched_risk == doctest::Approx(0.1 / 1.0));
}

TEST_CASE("split holes make the surrounding label-one mass vulnerable") {
  dist::IntervalParityModel model = dist::make_interval_parity(2, {0}, {1, 2});
  learn::UnionOfIntervals split;
  split.intervals = {{0.5, 1.1, false, true}, {1.1, 1.5, true, false}};
  CHECK(exact_adv_risk_interval(split, model, 0.0) == doctest::Approx(0.0));
  double risk = exact_adv_risk_interval(split, model, 0.04);
  // The hole at 1.1 infects (1.06, 1.14), all inside the support.
  CHECK(risk == doctest::Approx(0.08 / 1.0));
}

TEST_CASE("exact interval risk against a quadrature oracle") {
  Rng rng(Seed{555});
  dist::IntervalParityModel model = dist::make_interval_parity(4, {0, 2}, {2, 5, 9, 13});
  for (int rep = 0; rep < 10; ++rep) {
    // Random closed-interval hypothesis around the support.
    std::vector<std::pair<double, double>> ivals;
    double cursor = 1.0;
    while (cursor < 14.0) {
      double lo = cursor + rng.next_double();
      double hi = lo + 0.2 + 0.8 * rng.next_double();
      if (hi > 14.5) break;
      ivals.emplace_back(lo, hi);
      cursor = hi + 0.3;
    }
    learn::UnionOfIntervals h = closed_union(ivals);
    double gamma = 0.2 * rng.next_double();
    double exact = exact_adv_risk_interval(h, model, gamma);

    // Quadrature: scan the support densely; a point is vulnerable when any
    // z within gamma is predicted differently from the true label.
    double vulnerable = 0.0, total = 0.0;
    const double dx = 1e-3;
    const double dz = gamma > 0 ? gamma / 400.0 : 1.0;
    for (std::int64_t j : model.centers) {
      int label = dist::true_label_cs(model, static_cast<double>(j));
      for (double x = static_cast<double>(j) - 0.25 + dx / 2; x < j + 0.25; x += dx) {
        total += dx;
        bool bad = h.predict1d(x) != label;
        for (double z = x - gamma; !bad && z <= x + gamma + 1e-12; z += dz)
          bad = h.predict1d(z) != label;
        vulnerable += bad ? dx : 0.0;
      }
    }
    CHECK(exact == doctest::Approx(vulnerable / total).epsilon(0.03));
  }
}

TEST_CASE("a 1-D halfspace feeds the interval evaluator") {
  // c_S: 1 -> 1, 2 -> 0; predicting 1 below 1.5 is exactly right.
  dist::IntervalParityModel model = dist::make_interval_parity(2, {0}, {1, 2});
  learn::LinearClassifier h{{-1.0}, 1.5};
  CHECK(exact_adv_risk_interval(h, model, 0.0) == doctest::Approx(0.0));
  // The boundary at 1.5 is 0.25 from both support edges.
  CHECK(exact_adv_risk_interval(h, model, 0.1) == doctest::Approx(0.0));
  // At 0.3 it infects (1.2, 1.25) and (1.75, 1.8) out of total mass 1.
  CHECK(exact_adv_risk_interval(h, model, 0.3) == doctest::Approx(0.1));
}

TEST_CASE("circular segment fraction endpoints and the paper constant") {
  CHECK(circular_segment_fraction(0.0) == doctest::Approx(0.0));
  CHECK(circular_segment_fraction(1.0) == doctest::Approx(0.5));
  CHECK(circular_segment_fraction(2.0) == doctest::Approx(1.0));
  CHECK(circular_segment_fraction(0.01) > 0.0005);
  CHECK_THROWS_AS(circular_segment_fraction(-0.1), Error);
  CHECK_THROWS_AS(circular_segment_fraction(2.1), Error);
  for (double a = 0.0; a < 1.95; a += 0.05)
    CHECK(circular_segment_fraction(a) < circular_segment_fraction(a + 0.05));
}

TEST_CASE("circular segment fraction against Monte Carlo") {
  Rng rng(Seed{808});
  for (double frac : {0.05, 0.3, 0.7, 1.2, 1.8}) {
    std::size_t inside = 0;
    const std::size_t n = 2000000;
    for (std::size_t i = 0; i < n; ++i) {
      double r = std::sqrt(rng.next_double());
      double th = 6.283185307179586 * rng.next_double();
      // Segment of height h cut at x <= h - 1 for a unit disk.
      inside += (r * std::cos(th) <= frac - 1.0) ? 1 : 0;
    }
    double mc = static_cast<double>(inside) / static_cast<double>(n);
    CHECK(circular_segment_fraction(frac) == doctest::Approx(mc).epsilon(0.02));
  }
}

TEST_CASE("exact parity-ball risks for the explicit separator") {
  dist::ParityBallModel model{1.0 / (2.0 * std::sqrt(2.0)) - 0.008, 6, 1};
  learn::LinearClassifier h{{1.0, -1.0}, -0.5};
  CHECK(exact_natural_risk_parity_balls(h, model) == doctest::Approx(0.0));
  CHECK(exact_adv_risk_parity_balls(h, model, 0.0) == doctest::Approx(0.0));

  double risk = exact_adv_risk_parity_balls(h, model, 0.021);
  CHECK(risk >= 0.0005);

  // Monte-Carlo oracle: every center sits at distance 0.5/sqrt(2) from the
  // plane; sample one ball and count points within gamma of it.
  Rng rng(Seed{99});
  const std::size_t n = 2000000;
  const double margin = 0.5 / std::sqrt(2.0);
  std::size_t vulnerable = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = model.radius * std::sqrt(rng.next_double());
    double th = 6.283185307179586 * rng.next_double();
    double dist_to_plane = margin - r * std::cos(th);
    vulnerable += dist_to_plane <= 0.021 ? 1 : 0;
  }
  double mc = static_cast<double>(vulnerable) / static_cast<double>(n);
  CHECK(risk == doctest::Approx(mc).epsilon(0.02));
}

TEST_CASE("parity-ball evaluator enforces its precondition") {
  dist::ParityBallModel model{0.3, 4, 1};
  learn::LinearClassifier clipping{{1.0, -1.0}, -0.5};
  // Shrink the margin below the radius by tilting the plane badly.
  learn::LinearClassifier wrong{{1.0, 1.0}, -4.5};
  CHECK(exact_natural_risk_parity_balls(wrong, model) > 0.0);
  CHECK_THROWS_AS(exact_adv_risk_parity_balls(wrong, model, 0.1), Error);
  CHECK_NOTHROW(exact_adv_risk_parity_balls(clipping, model, 0.1));
}

TEST_CASE("grid parity classifier is robust below the wall distance") {
  dist::ParityBallModel model{1.0 / (2.0 * std::sqrt(2.0)) - 0.008, 5, 1};
  learn::ParityHypothesis g;
  g.planar = true;
  g.orientation = 1;
  CHECK(exact_natural_risk_parity_balls(g, model) == doctest::Approx(0.0));
  for (double gamma : {0.0, 0.05, 0.1, 0.14})
    CHECK(exact_adv_risk_parity_balls(g, model, gamma) == doctest::Approx(0.0));
  // Beyond the wall gap the balls start leaking.
  CHECK(exact_adv_risk_parity_balls(g, model, 0.2) > 0.0);

  learn::ParityHypothesis wrong = g;
  wrong.orientation = 0;
  CHECK(exact_natural_risk_parity_balls(wrong, model) == doctest::Approx(1.0));
  CHECK_THROWS_AS(exact_adv_risk_parity_balls(wrong, model, 0.1), Error);
}

TEST_CASE("parity-ball wall overflow against Monte Carlo") {
  dist::ParityBallModel model{0.34, 3, 1};
  learn::ParityHypothesis g;
  g.planar = true;
  g.orientation = 1;
  double gamma = 0.2;
  double exact = exact_adv_risk_parity_balls(g, model, gamma);
  Rng rng(Seed{77});
  std::size_t vulnerable = 0;
  const std::size_t n = 2000000;
  const double t = 0.5 - gamma;
  for (std::size_t i = 0; i < n; ++i) {
    double r = model.radius * std::sqrt(rng.next_double());
    double th = 6.283185307179586 * rng.next_double();
    double u = r * std::cos(th), v = r * std::sin(th);
    vulnerable += (std::fabs(u) > t || std::fabs(v) > t) ? 1 : 0;
  }
  double mc = static_cast<double>(vulnerable) / static_cast<double>(n);
  CHECK(exact == doctest::Approx(mc).epsilon(0.02));
}

TEST_CASE("pgd attack basics") {
  // Logits (0, x - 0.5): ascending the label-0 loss walks x upward until the
  // box clips at 0.55, which flips the prediction.
  nn::Mlp net = nn::Mlp::init({1, 2}, Seed{1});
  net.weights[0] << 0.0, 1.0;
  net.biases[0] << 0.0, -0.5;

  AttackConfig cfg;
  cfg.norm = Norm::sup;
  cfg.gamma = 0.1;
  cfg.steps = 10;
  cfg.step_size = 0.02;
  auto adv = pgd_attack(net, Point{0.45}, 0, cfg);
  CHECK(adv[0] == doctest::Approx(0.55));
  CHECK(net.predict(Point{adv[0]}) == 1);

  cfg.gamma = 0.0;
  auto still = pgd_attack(net, Point{0.45}, 0, cfg);
  CHECK(still[0] == 0.45);

  cfg.gamma = 0.1;
  cfg.steps = 0;
  auto start = pgd_attack(net, Point{0.45}, 0, cfg);
  CHECK(start[0] == 0.45);
}

TEST_CASE("pgd outputs stay inside the gamma ball") {
  Rng rng(Seed{2025});
  nn::Mlp net = nn::Mlp::init({2, 12, 2}, Seed{17});
  for (Norm norm : {Norm::sup, Norm::euclidean}) {
    for (int rep = 0; rep < 20; ++rep) {
      Eigen::MatrixXd x(1, 2);
      x << 2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0;
      AttackConfig cfg;
      cfg.norm = norm;
      cfg.gamma = 0.05 + 0.2 * rng.next_double();
      cfg.steps = 15;
      cfg.step_size = 0.03;
      cfg.random_start = rep % 2 == 1;
      cfg.seed = Seed{rng.next_u64()};
      Eigen::MatrixXd adv = pgd_attack_batch(net, x, {static_cast<int>(rng.next_below(2))}, cfg);
      Eigen::RowVectorXd d = adv.row(0) - x.row(0);
      double dist = norm == Norm::sup ? d.cwiseAbs().maxCoeff() : d.norm();
      CHECK(dist <= cfg.gamma * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("grid risk: gamma zero reduces to natural risk and grows with gamma") {
  dist::ParityBallModel model{0.3, 3, 1};
  Dataset eval = dist::sample_parity_balls(model, 400, Seed{3});
  learn::LinearClassifier h{{1.0, -1.0}, -0.5};
  Predictor predict = [&](const Point& x) { return h.predict(x); };
  double natural = natural_risk(predict, eval);
  CHECK(grid_adv_risk(predict, eval, 0.0, Norm::euclidean, 16) == doctest::Approx(natural));
  double prev = 0.0;
  for (double gamma : {0.02, 0.05, 0.1, 0.2}) {
    double risk = grid_adv_risk(predict, eval, gamma, Norm::euclidean, 16);
    CHECK(risk >= prev);
    prev = risk;
  }
  // Worker count never changes the measurement.
  CHECK(grid_adv_risk(predict, eval, 0.1, Norm::euclidean, 16, 3) ==
        grid_adv_risk(predict, eval, 0.1, Norm::euclidean, 16, 1));
}

TEST_CASE("grid risk matches the exact geometry within a hundredth") {
  dist::ParityBallModel model{1.0 / (2.0 * std::sqrt(2.0)) - 0.008, 6, 1};
  learn::LinearClassifier h{{1.0, -1.0}, -0.5};
  Dataset eval = dist::sample_parity_balls(model, 20000, Seed{21});
  double gamma = 0.021;
  double exact = exact_adv_risk_parity_balls(h, model, gamma);
  Predictor predict = [&](const Point& x) { return h.predict(x); };
  double grid = grid_adv_risk(predict, eval, gamma, Norm::euclidean, 64);
  CHECK(std::fabs(grid - exact) < 0.01);
}

TEST_CASE("empirical risk: gamma zero is natural risk, more restarts never hurt") {
  dist::BlobWorld w;
  w.circles = {{Point{0.0, 0.0}, 0.4, 0, -1.0}, {Point{1.2, 0.3}, 0.4, 1, -1.0}};
  Dataset train = dist::sample_blobs(w, 200, Seed{5});
  nn::TrainConfig cfg;
  cfg.epochs = 60;
  cfg.batch_size = 32;
  cfg.seed = Seed{11};
  nn::TrainResult result = nn::train_natural(train, {16, 16}, cfg);
  Dataset test = dist::sample_blobs(w, 300, Seed{6});

  AttackConfig zero;
  zero.gamma = 0.0;
  double natural = natural_risk([&](const Point& x) { return result.net.predict(x); }, test);
  CHECK(empirical_adv_risk(result.net, test, zero) == doctest::Approx(natural));

  AttackConfig one;
  one.gamma = 0.25;
  one.steps = 8;
  one.step_size = 0.05;
  one.random_start = true;
  one.restarts = 1;
  one.seed = Seed{77};
  AttackConfig three = one;
  three.restarts = 3;
  CHECK(empirical_adv_risk(result.net, test, three) >= empirical_adv_risk(result.net, test, one));
}

TEST_CASE("risk sandwich on small trained nets") {
  dist::ParityBallModel model{0.3, 2, 1};
  Dataset train = dist::sample_parity_balls(model, 300, Seed{41});
  Dataset test = dist::sample_parity_balls(model, 200, Seed{42});
  nn::TrainConfig cfg;
  cfg.epochs = 120;
  cfg.batch_size = 32;
  cfg.seed = Seed{43};
  nn::TrainResult result = nn::train_natural(train, {24, 24}, cfg);

  AttackConfig attack;
  attack.norm = Norm::sup;
  attack.gamma = 0.1;
  attack.steps = 25;
  attack.step_size = 0.01;

  double natural = natural_risk([&](const Point& x) { return result.net.predict(x); }, test);
  double pgd = empirical_adv_risk(result.net, test, attack);
  double grid = grid_adv_risk(result.net, test, attack.gamma, attack.norm, 24);
  CHECK(natural <= pgd + 1e-12);
  CHECK(pgd <= grid + 0.01);
}

TEST_CASE("risk report validates its ordering invariant") {
  CHECK_THROWS_AS(make_report("grid", 0.1, 0.5, 0.3, 10, 4, 0), Error);
  RiskReport r = make_report("pgd-empirical", 0.1, 0.1, 0.4, 100, 0, 7);
  CHECK(to_csv_row(r) == "pgd-empirical,0.1,0.1,0.4,100,0,7");
  CHECK(risk_report_csv_header() == "method,gamma,natural,adversarial,n_eval,resolution,seed");
}
