#pragma once

#include <utility>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"
#include "nn/mlp.hpp"
#include "risk/attack.hpp"

namespace lab::nn {

struct TrainConfig {
  std::vector<std::pair<int, double>> lr_schedule{{0, 0.1}};  // (from_epoch, lr)
  int batch_size = 128;
  int epochs = 60;
  Seed seed{0};
  bool shuffle = true;
  bool stop_at_zero_error = true;  // stop once a full pass makes no mistakes
};

void validate(const TrainConfig& cfg);

struct TraceRow {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
};

struct TrainResult {
  Mlp net;
  std::vector<TraceRow> trace;
  bool reached_zero_error = false;
  int epochs_run = 0;
};

/// Plain SGD on shuffled mini-batches (no momentum, no weight decay).
TrainResult train_natural(const TrainView& data, const std::vector<int>& hidden_widths,
                          const TrainConfig& cfg);

/// Same loop, but every batch is replaced by its PGD perturbation against the
/// current net before the gradient step. With a zero-radius attack the
/// trajectory is identical to train_natural at the same seed.
TrainResult train_adversarial(const TrainView& data, const std::vector<int>& hidden_widths,
                              const TrainConfig& cfg, const risk::AttackConfig& attack);

/// Misclassified fraction of the dataset under the current net.
double train_error(const Mlp& net, const TrainView& data);

void trace_to_csv(const std::vector<TraceRow>& trace, const std::string& path,
                  const std::string& header_comment);

}  // namespace lab::nn
