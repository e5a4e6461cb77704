#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"

namespace lab::nn {

/// Fully connected net: affine layers with rectifier on every hidden layer,
/// raw logits at the output (softmax lives in the loss). Sample batches are
/// row-major: one sample per row.
class Mlp {
public:
  Mlp() = default;

  /// Glorot-uniform initialisation in +-sqrt(6 / (fan_in + fan_out)), seeded.
  static Mlp init(std::vector<int> widths, Seed seed);

  const std::vector<int>& widths() const { return widths_; }
  int input_dim() const { return widths_.front(); }
  int output_dim() const { return widths_.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }

  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;
  Eigen::RowVectorXd forward(const Point& x) const;
  int predict(const Point& x) const;

  std::vector<Eigen::MatrixXd> weights;      // [l]: widths[l] x widths[l+1]
  std::vector<Eigen::RowVectorXd> biases;    // [l]: widths[l+1]

  void set_widths(std::vector<int> widths);  // shape bookkeeping for deserialisation

private:
  std::vector<int> widths_;
};

struct Gradients {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::RowVectorXd> b;
};

/// Mean softmax cross-entropy over the batch plus exact parameter gradients.
/// When `mistakes` is given it receives the batch's argmax misclassification
/// count from the same forward pass.
double loss_and_grad(const Mlp& net, const Eigen::MatrixXd& inputs, const std::vector<int>& labels,
                     Gradients& out, std::size_t* mistakes = nullptr);

double mean_cross_entropy(const Mlp& net, const Eigen::MatrixXd& inputs,
                          const std::vector<int>& labels);

/// Per-sample cross-entropy values.
Eigen::VectorXd per_sample_loss(const Mlp& net, const Eigen::MatrixXd& inputs,
                                const std::vector<int>& labels);

/// Gradient of each sample's own loss w.r.t. its input row.
Eigen::MatrixXd input_grad_batch(const Mlp& net, const Eigen::MatrixXd& inputs,
                                 const std::vector<int>& labels);

std::vector<double> input_grad(const Mlp& net, const Point& x, int label);

/// Fine-class to coarse-class assignment; coarse ids must be contiguous.
struct CoarseMap {
  std::vector<int> fine_to_coarse;
  int coarse_classes = 0;
};

void validate(const CoarseMap& map, int fine_classes);

/// Coarse logit c = sum of fine logits mapped to c.
Eigen::RowVectorXd aggregate_fine_to_coarse(const Eigen::RowVectorXd& logits, const CoarseMap& map);
Eigen::MatrixXd aggregate_fine_to_coarse(const Eigen::MatrixXd& logits, const CoarseMap& map);

nlohmann::json checkpoint(const Mlp& net);
Mlp from_checkpoint(const nlohmann::json& j);

Eigen::MatrixXd dataset_matrix(const TrainView& data);
std::vector<int> dataset_labels(const TrainView& data);

}  // namespace lab::nn
