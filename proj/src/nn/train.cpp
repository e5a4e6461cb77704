#include "nn/train.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace lab::nn {

void validate(const TrainConfig& cfg) {
  require(!cfg.lr_schedule.empty(), errc::invalid_argument, "TrainConfig: empty learning-rate schedule");
  require(cfg.lr_schedule.front().first == 0, errc::invalid_argument,
          "TrainConfig: schedule must start at epoch 0");
  for (std::size_t i = 0; i + 1 < cfg.lr_schedule.size(); ++i)
    require(cfg.lr_schedule[i].first < cfg.lr_schedule[i + 1].first, errc::invalid_argument,
            "TrainConfig: schedule epochs must increase");
  for (const auto& [epoch, lr] : cfg.lr_schedule) {
    (void)epoch;
    require(lr >= 0.0, errc::invalid_argument, "TrainConfig: negative learning rate");
  }
  require(cfg.batch_size >= 1, errc::invalid_argument, "TrainConfig: batch size must be >= 1");
  require(cfg.epochs >= 1, errc::invalid_argument, "TrainConfig: epochs must be >= 1");
}

namespace {

double lr_at(const TrainConfig& cfg, int epoch) {
  double lr = cfg.lr_schedule.front().second;
  for (const auto& [from, value] : cfg.lr_schedule)
    if (epoch >= from) lr = value;
  return lr;
}

TrainResult run_sgd(const TrainView& data, const std::vector<int>& hidden_widths,
                    const TrainConfig& cfg, const risk::AttackConfig* attack) {
  validate(cfg);
  require(!data.empty(), errc::invalid_argument, "train: empty dataset");
  for (int w : hidden_widths)
    require(w >= 1, errc::invalid_argument, "train: hidden widths must be positive");

  std::vector<int> widths;
  widths.push_back(data.dim());
  widths.insert(widths.end(), hidden_widths.begin(), hidden_widths.end());
  widths.push_back(data.num_classes());

  TrainResult result;
  result.net = Mlp::init(widths, cfg.seed);

  const Eigen::MatrixXd inputs = dataset_matrix(data);
  const std::vector<int> labels = dataset_labels(data);
  const std::size_t m = data.size();

  Rng shuffle_rng(Seed{cfg.seed.value ^ 0xa5a5a5a5deadbeefULL});
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});

  Gradients grads;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) {
      for (std::size_t i = 0; i + 1 < m; ++i) {
        std::size_t j = i + static_cast<std::size_t>(shuffle_rng.next_below(m - i));
        std::swap(order[i], order[j]);
      }
    }

    const double lr = lr_at(cfg, epoch);
    double loss_sum = 0.0;
    std::size_t mistakes = 0;
    for (std::size_t start = 0; start < m; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(m, start + static_cast<std::size_t>(cfg.batch_size));
      const auto rows = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd batch(rows, inputs.cols());
      std::vector<int> batch_labels(static_cast<std::size_t>(rows));
      for (Eigen::Index r = 0; r < rows; ++r) {
        batch.row(r) = inputs.row(static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(r)]));
        batch_labels[static_cast<std::size_t>(r)] = labels[order[start + static_cast<std::size_t>(r)]];
      }
      if (attack) batch = risk::pgd_attack_batch(result.net, batch, batch_labels, *attack);

      std::size_t batch_mistakes = 0;
      double loss = loss_and_grad(result.net, batch, batch_labels, grads, &batch_mistakes);
      loss_sum += loss * static_cast<double>(rows);
      mistakes += batch_mistakes;

      for (int l = 0; l < result.net.layer_count(); ++l) {
        result.net.weights[static_cast<std::size_t>(l)] -= lr * grads.w[static_cast<std::size_t>(l)];
        result.net.biases[static_cast<std::size_t>(l)] -= lr * grads.b[static_cast<std::size_t>(l)];
      }
    }

    result.trace.push_back({epoch, loss_sum / static_cast<double>(m),
                            1.0 - static_cast<double>(mistakes) / static_cast<double>(m)});
    result.epochs_run = epoch + 1;
    if (mistakes == 0 && cfg.stop_at_zero_error) {
      result.reached_zero_error = true;
      break;
    }
  }
  return result;
}

}  // namespace

TrainResult train_natural(const TrainView& data, const std::vector<int>& hidden_widths,
                          const TrainConfig& cfg) {
  return run_sgd(data, hidden_widths, cfg, nullptr);
}

TrainResult train_adversarial(const TrainView& data, const std::vector<int>& hidden_widths,
                              const TrainConfig& cfg, const risk::AttackConfig& attack) {
  risk::validate(attack);
  return run_sgd(data, hidden_widths, cfg, &attack);
}

double train_error(const Mlp& net, const TrainView& data) {
  require(!data.empty(), errc::invalid_argument, "train_error: empty dataset");
  Eigen::MatrixXd inputs = dataset_matrix(data);
  Eigen::MatrixXd logits = net.forward_batch(inputs);
  std::size_t wrong = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index arg = 0;
    logits.row(i).maxCoeff(&arg);
    wrong += arg != data.y(static_cast<std::size_t>(i)) ? 1 : 0;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

void trace_to_csv(const std::vector<TraceRow>& trace, const std::string& path,
                  const std::string& header_comment) {
  std::ofstream f(path);
  require(f.good(), errc::io_failure, "cannot open for writing: " + path);
  if (!header_comment.empty()) f << "# " << header_comment << '\n';
  f << "epoch,train_loss,train_acc\n";
  for (const auto& row : trace)
    f << row.epoch << ',' << format_double(row.train_loss) << ',' << format_double(row.train_acc)
      << '\n';
  require(f.good(), errc::io_failure, "write failed: " + path);
}

}  // namespace lab::nn
