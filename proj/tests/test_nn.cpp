#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "dist/models.hpp"
#include "nn/mlp.hpp"
#include "nn/train.hpp"
#include "risk/attack.hpp"

using namespace lab;
using namespace lab::nn;

namespace {

Eigen::MatrixXd random_batch(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = 2.0 * rng.next_double() - 1.0;
  return m;
}

std::vector<int> random_labels(Rng& rng, int rows, int classes) {
  std::vector<int> y(static_cast<std::size_t>(rows));
  for (auto& v : y) v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(classes)));
  return y;
}

// Smallest pre-activation magnitude across the batch; finite differences are
// only trustworthy away from rectifier kinks.
double min_preactivation(const Mlp& net, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd a = x;
  double best = 1e300;
  for (int l = 0; l + 1 < net.layer_count() + 1; ++l) {
    if (l >= net.layer_count()) break;
    Eigen::MatrixXd z = (a * net.weights[static_cast<std::size_t>(l)]).rowwise() +
                        net.biases[static_cast<std::size_t>(l)];
    if (l + 1 < net.layer_count()) {
      best = std::min(best, z.cwiseAbs().minCoeff());
      a = z.cwiseMax(0.0);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("zero net gives uniform softmax loss") {
  Mlp net = Mlp::init({3, 4, 2}, Seed{1});
  for (auto& w : net.weights) w.setZero();
  for (auto& b : net.biases) b.setZero();
  Eigen::MatrixXd x(2, 3);
  x << 0.3, -0.7, 1.1, 0.0, 0.25, -0.5;
  CHECK(mean_cross_entropy(net, x, {0, 1}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  Eigen::MatrixXd logits = net.forward_batch(x);
  CHECK(logits.cwiseAbs().maxCoeff() == 0.0);
  // Zero logits are symmetric, so the input gradient vanishes in binary mode.
  Eigen::MatrixXd g = input_grad_batch(net, x, {0, 1});
  CHECK(g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identity-like single layer reproduces its input") {
  Mlp net = Mlp::init({2, 2}, Seed{1});
  net.weights[0] << 1.0, 0.0, 0.0, 1.0;
  net.biases[0].setZero();
  Eigen::RowVectorXd out = net.forward(Point{0.25, -3.5});
  CHECK(out(0) == doctest::Approx(0.25));
  CHECK(out(1) == doctest::Approx(-3.5));
}

TEST_CASE("forward is deterministic") {
  Mlp a = Mlp::init({4, 16, 16, 3}, Seed{77});
  Mlp b = Mlp::init({4, 16, 16, 3}, Seed{77});
  Point x{0.1, -0.2, 0.33, 0.9};
  CHECK(a.forward(x) == b.forward(x));
  CHECK(a.forward(x) == a.forward(x));
}

TEST_CASE("parameter gradients match central finite differences") {
  Rng rng(Seed{2024});
  int checked = 0;
  const double h = 1e-6;
  while (checked < 5) {
    Mlp net = Mlp::init({2, 8, 2}, Seed{rng.next_u64()});
    Eigen::MatrixXd x = random_batch(rng, 6, 2);
    if (min_preactivation(net, x) < 1e-3) continue;  // kink guard
    std::vector<int> y = random_labels(rng, 6, 2);

    Gradients g;
    loss_and_grad(net, x, y, g);
    for (int l = 0; l < net.layer_count(); ++l) {
      for (Eigen::Index i = 0; i < net.weights[static_cast<std::size_t>(l)].rows(); ++i) {
        for (Eigen::Index j = 0; j < net.weights[static_cast<std::size_t>(l)].cols(); ++j) {
          Mlp up = net, dn = net;
          up.weights[static_cast<std::size_t>(l)](i, j) += h;
          dn.weights[static_cast<std::size_t>(l)](i, j) -= h;
          double fd = (mean_cross_entropy(up, x, y) - mean_cross_entropy(dn, x, y)) / (2 * h);
          double an = g.w[static_cast<std::size_t>(l)](i, j);
          CHECK(std::fabs(an - fd) / std::max({1e-2, std::fabs(an), std::fabs(fd)}) < 1e-5);
        }
      }
      for (Eigen::Index j = 0; j < net.biases[static_cast<std::size_t>(l)].size(); ++j) {
        Mlp up = net, dn = net;
        up.biases[static_cast<std::size_t>(l)](j) += h;
        dn.biases[static_cast<std::size_t>(l)](j) -= h;
        double fd = (mean_cross_entropy(up, x, y) - mean_cross_entropy(dn, x, y)) / (2 * h);
        double an = g.b[static_cast<std::size_t>(l)](j);
        CHECK(std::fabs(an - fd) / std::max({1e-2, std::fabs(an), std::fabs(fd)}) < 1e-5);
      }
    }
    ++checked;
  }
}

TEST_CASE("input gradients match central finite differences") {
  Rng rng(Seed{4048});
  int checked = 0;
  const double h = 1e-6;
  while (checked < 5) {
    Mlp net = Mlp::init({3, 10, 3}, Seed{rng.next_u64()});
    Eigen::MatrixXd x = random_batch(rng, 4, 3);
    if (min_preactivation(net, x) < 1e-3) continue;
    std::vector<int> y = random_labels(rng, 4, 3);
    Eigen::MatrixXd g = input_grad_batch(net, x, y);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        Eigen::MatrixXd up = x, dn = x;
        up(i, j) += h;
        dn(i, j) -= h;
        // Per-sample loss: isolate row i.
        double fu = per_sample_loss(net, up, y)(i);
        double fdn = per_sample_loss(net, dn, y)(i);
        double fd = (fu - fdn) / (2 * h);
        CHECK(std::fabs(g(i, j) - fd) / std::max({1e-2, std::fabs(g(i, j)), std::fabs(fd)}) < 1e-5);
      }
    }
    ++checked;
  }
}

TEST_CASE("duplicated batch halves leave the mean loss unchanged") {
  Rng rng(Seed{11});
  Mlp net = Mlp::init({3, 6, 2}, Seed{5});
  Eigen::MatrixXd x = random_batch(rng, 5, 3);
  std::vector<int> y = random_labels(rng, 5, 2);
  Eigen::MatrixXd xx(10, 3);
  xx << x, x;
  std::vector<int> yy = y;
  yy.insert(yy.end(), y.begin(), y.end());
  CHECK(mean_cross_entropy(net, xx, yy) == doctest::Approx(mean_cross_entropy(net, x, y)).epsilon(1e-12));
}

TEST_CASE("training with zero learning rate changes nothing") {
  dist::BlobWorld w;
  w.circles = {{Point{0.0, 0.0}, 0.5, 0, -1.0}, {Point{3.0, 0.0}, 0.5, 1, -1.0}};
  Dataset ds = dist::sample_blobs(w, 64, Seed{9});
  TrainConfig cfg;
  cfg.lr_schedule = {{0, 0.0}};
  cfg.epochs = 3;
  cfg.seed = Seed{42};
  cfg.stop_at_zero_error = false;
  TrainResult result = train_natural(ds, {8}, cfg);
  Mlp fresh = Mlp::init({2, 8, 2}, Seed{42});
  for (int l = 0; l < fresh.layer_count(); ++l) {
    CHECK(result.net.weights[static_cast<std::size_t>(l)] == fresh.weights[static_cast<std::size_t>(l)]);
    CHECK(result.net.biases[static_cast<std::size_t>(l)] == fresh.biases[static_cast<std::size_t>(l)]);
  }
}

TEST_CASE("training is deterministic and fits a separable blob pair") {
  dist::BlobWorld w;
  w.circles = {{Point{0.0, 0.0}, 0.5, 0, -1.0}, {Point{2.0, 1.0}, 0.5, 1, -1.0}};
  Dataset ds = dist::sample_blobs(w, 256, Seed{13});
  TrainConfig cfg;
  cfg.lr_schedule = {{0, 0.1}};
  cfg.epochs = 200;
  cfg.batch_size = 32;
  cfg.seed = Seed{7};
  TrainResult a = train_natural(ds, {100, 100}, cfg);
  TrainResult b = train_natural(ds, {100, 100}, cfg);
  CHECK(a.reached_zero_error);
  CHECK(a.epochs_run == b.epochs_run);
  for (int l = 0; l < a.net.layer_count(); ++l)
    CHECK(a.net.weights[static_cast<std::size_t>(l)] == b.net.weights[static_cast<std::size_t>(l)]);
  CHECK(train_error(a.net, ds) == 0.0);
}

TEST_CASE("adversarial training with a zero-radius attack is natural training") {
  dist::BlobWorld w;
  w.circles = {{Point{0.0, 0.0}, 0.5, 0, -1.0}, {Point{2.0, 1.0}, 0.5, 1, -1.0}};
  Dataset ds = dist::sample_blobs(w, 128, Seed{23});
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 16;
  cfg.seed = Seed{3};
  cfg.stop_at_zero_error = false;
  risk::AttackConfig attack;
  attack.gamma = 0.0;
  attack.steps = 5;
  TrainResult nat = train_natural(ds, {16, 16}, cfg);
  TrainResult adv = train_adversarial(ds, {16, 16}, cfg, attack);
  for (int l = 0; l < nat.net.layer_count(); ++l) {
    CHECK(nat.net.weights[static_cast<std::size_t>(l)] == adv.net.weights[static_cast<std::size_t>(l)]);
    CHECK(nat.net.biases[static_cast<std::size_t>(l)] == adv.net.biases[static_cast<std::size_t>(l)]);
  }
  for (std::size_t i = 0; i < nat.trace.size(); ++i) {
    CHECK(nat.trace[i].train_loss == adv.trace[i].train_loss);
    CHECK(nat.trace[i].train_acc == adv.trace[i].train_acc);
  }
}

TEST_CASE("fine-to-coarse aggregation sums logit groups") {
  CoarseMap identity{{0, 1, 2}, 3};
  Eigen::RowVectorXd logits(3);
  logits << 0.5, -1.0, 2.0;
  CHECK(aggregate_fine_to_coarse(logits, identity) == logits);

  CoarseMap pairs{{0, 0, 1, 1}, 2};
  Eigen::RowVectorXd fine(4);
  fine << 1.0, 2.0, 3.0, 4.0;
  Eigen::RowVectorXd coarse = aggregate_fine_to_coarse(fine, pairs);
  CHECK(coarse(0) == doctest::Approx(3.0));
  CHECK(coarse(1) == doctest::Approx(7.0));

  CoarseMap gap{{0, 2}, 3};  // coarse id 1 never used
  CHECK_THROWS_AS(validate(gap, 2), Error);
  CoarseMap short_map{{0}, 1};
  CHECK_THROWS_AS(aggregate_fine_to_coarse(fine, short_map), Error);
}

TEST_CASE("checkpoint JSON round-trips the network") {
  Mlp net = Mlp::init({3, 12, 5, 2}, Seed{31});
  Mlp back = from_checkpoint(checkpoint(net));
  CHECK(back.widths() == net.widths());
  for (int l = 0; l < net.layer_count(); ++l) {
    CHECK(back.weights[static_cast<std::size_t>(l)] == net.weights[static_cast<std::size_t>(l)]);
    CHECK(back.biases[static_cast<std::size_t>(l)] == net.biases[static_cast<std::size_t>(l)]);
  }
  Point x{0.2, -0.4, 0.6};
  CHECK(back.forward(x) == net.forward(x));
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.lr_schedule = {};
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = TrainConfig{};
  cfg.lr_schedule = {{5, 0.1}};
  CHECK_THROWS_AS(validate(cfg), Error);  // must start at epoch 0
}
