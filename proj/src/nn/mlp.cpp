#include "nn/mlp.hpp"

#include <cmath>

#include "core/error.hpp"

namespace lab::nn {

namespace {

void check_shapes(const std::vector<int>& widths) {
  require(widths.size() >= 2, errc::invalid_argument, "Mlp: need at least input and output widths");
  for (int w : widths) require(w >= 1, errc::invalid_argument, "Mlp: widths must be positive");
}

// Forward pass keeping pre-activations; returns logits, fills hidden
// activations (post-rectifier) when wanted.
Eigen::MatrixXd forward_full(const Mlp& net, const Eigen::MatrixXd& inputs,
                             std::vector<Eigen::MatrixXd>* activations) {
  require(inputs.cols() == net.input_dim(), errc::invalid_argument, "Mlp: input dimension mismatch");
  Eigen::MatrixXd a = inputs;
  if (activations) activations->push_back(a);
  const int layers = net.layer_count();
  for (int l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = (a * net.weights[static_cast<std::size_t>(l)]).rowwise() +
                        net.biases[static_cast<std::size_t>(l)];
    if (l + 1 < layers) {
      a = z.cwiseMax(0.0);
      if (activations) activations->push_back(a);
    } else {
      a = std::move(z);
    }
  }
  return a;
}

// Row-wise softmax with the max subtracted; also returns per-row logsumexp.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits, Eigen::VectorXd* logsumexp) {
  Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  Eigen::MatrixXd shifted = logits.colwise() - row_max;
  Eigen::MatrixXd expd = shifted.array().exp().matrix();
  Eigen::VectorXd sums = expd.rowwise().sum();
  if (logsumexp) *logsumexp = sums.array().log().matrix() + row_max;
  return expd.array().colwise() / sums.array();
}

void check_labels(const std::vector<int>& labels, Eigen::Index rows, int classes) {
  require(static_cast<Eigen::Index>(labels.size()) == rows, errc::invalid_argument,
          "label count does not match batch rows");
  for (int y : labels)
    require(y >= 0 && y < classes, errc::invalid_argument, "label outside logit range");
}

}  // namespace

Mlp Mlp::init(std::vector<int> widths, Seed seed) {
  check_shapes(widths);
  Mlp net;
  net.widths_ = std::move(widths);
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < net.widths_.size(); ++l) {
    int fan_in = net.widths_[l];
    int fan_out = net.widths_[l + 1];
    double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i)
      for (int j = 0; j < fan_out; ++j) w(i, j) = bound * (2.0 * rng.next_double() - 1.0);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::RowVectorXd::Zero(fan_out));
  }
  return net;
}

void Mlp::set_widths(std::vector<int> widths) {
  check_shapes(widths);
  widths_ = std::move(widths);
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& inputs) const {
  return forward_full(*this, inputs, nullptr);
}

Eigen::RowVectorXd Mlp::forward(const Point& x) const {
  Eigen::MatrixXd one(1, x.dim());
  for (int j = 0; j < x.dim(); ++j) one(0, j) = x[static_cast<std::size_t>(j)];
  return forward_full(*this, one, nullptr).row(0);
}

int Mlp::predict(const Point& x) const {
  Eigen::RowVectorXd logits = forward(x);
  Eigen::Index best = 0;
  logits.maxCoeff(&best);
  return static_cast<int>(best);
}

double loss_and_grad(const Mlp& net, const Eigen::MatrixXd& inputs, const std::vector<int>& labels,
                     Gradients& out, std::size_t* mistakes) {
  check_labels(labels, inputs.rows(), net.output_dim());
  std::vector<Eigen::MatrixXd> acts;
  Eigen::MatrixXd logits = forward_full(net, inputs, &acts);
  Eigen::VectorXd logsumexp;
  Eigen::MatrixXd probs = softmax_rows(logits, &logsumexp);

  const auto rows = inputs.rows();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) loss += logsumexp(i) - logits(i, labels[static_cast<std::size_t>(i)]);
  loss /= static_cast<double>(rows);

  if (mistakes) {
    std::size_t wrong = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      Eigen::Index arg = 0;
      logits.row(i).maxCoeff(&arg);
      wrong += arg != labels[static_cast<std::size_t>(i)] ? 1 : 0;
    }
    *mistakes = wrong;
  }

  Eigen::MatrixXd delta = probs;
  for (Eigen::Index i = 0; i < rows; ++i) delta(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
  delta /= static_cast<double>(rows);

  const int layers = net.layer_count();
  out.w.assign(static_cast<std::size_t>(layers), {});
  out.b.assign(static_cast<std::size_t>(layers), {});
  for (int l = layers - 1; l >= 0; --l) {
    out.w[static_cast<std::size_t>(l)] = acts[static_cast<std::size_t>(l)].transpose() * delta;
    out.b[static_cast<std::size_t>(l)] = delta.colwise().sum();
    if (l > 0) {
      delta = (delta * net.weights[static_cast<std::size_t>(l)].transpose())
                  .cwiseProduct((acts[static_cast<std::size_t>(l)].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

double mean_cross_entropy(const Mlp& net, const Eigen::MatrixXd& inputs,
                          const std::vector<int>& labels) {
  return per_sample_loss(net, inputs, labels).mean();
}

Eigen::VectorXd per_sample_loss(const Mlp& net, const Eigen::MatrixXd& inputs,
                                const std::vector<int>& labels) {
  check_labels(labels, inputs.rows(), net.output_dim());
  Eigen::MatrixXd logits = forward_full(net, inputs, nullptr);
  Eigen::VectorXd logsumexp;
  softmax_rows(logits, &logsumexp);
  Eigen::VectorXd loss(inputs.rows());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i)
    loss(i) = logsumexp(i) - logits(i, labels[static_cast<std::size_t>(i)]);
  return loss;
}

Eigen::MatrixXd input_grad_batch(const Mlp& net, const Eigen::MatrixXd& inputs,
                                 const std::vector<int>& labels) {
  check_labels(labels, inputs.rows(), net.output_dim());
  std::vector<Eigen::MatrixXd> acts;
  Eigen::MatrixXd logits = forward_full(net, inputs, &acts);
  Eigen::MatrixXd delta = softmax_rows(logits, nullptr);
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) delta(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
  for (int l = net.layer_count() - 1; l >= 1; --l) {
    delta = (delta * net.weights[static_cast<std::size_t>(l)].transpose())
                .cwiseProduct((acts[static_cast<std::size_t>(l)].array() > 0.0).cast<double>().matrix());
  }
  return delta * net.weights[0].transpose();
}

std::vector<double> input_grad(const Mlp& net, const Point& x, int label) {
  Eigen::MatrixXd one(1, x.dim());
  for (int j = 0; j < x.dim(); ++j) one(0, j) = x[static_cast<std::size_t>(j)];
  Eigen::MatrixXd g = input_grad_batch(net, one, {label});
  return std::vector<double>(g.data(), g.data() + g.cols());
}

void validate(const CoarseMap& map, int fine_classes) {
  require(static_cast<int>(map.fine_to_coarse.size()) == fine_classes, errc::invalid_argument,
          "CoarseMap: map must cover every fine class");
  require(map.coarse_classes >= 1, errc::invalid_argument, "CoarseMap: no coarse classes");
  std::vector<bool> hit(static_cast<std::size_t>(map.coarse_classes), false);
  for (int c : map.fine_to_coarse) {
    require(c >= 0 && c < map.coarse_classes, errc::invalid_argument, "CoarseMap: id out of range");
    hit[static_cast<std::size_t>(c)] = true;
  }
  for (bool h : hit) require(h, errc::invalid_argument, "CoarseMap: coarse ids must be contiguous and used");
}

Eigen::MatrixXd aggregate_fine_to_coarse(const Eigen::MatrixXd& logits, const CoarseMap& map) {
  validate(map, static_cast<int>(logits.cols()));
  Eigen::MatrixXd coarse = Eigen::MatrixXd::Zero(logits.rows(), map.coarse_classes);
  for (Eigen::Index f = 0; f < logits.cols(); ++f)
    coarse.col(map.fine_to_coarse[static_cast<std::size_t>(f)]) += logits.col(f);
  return coarse;
}

Eigen::RowVectorXd aggregate_fine_to_coarse(const Eigen::RowVectorXd& logits, const CoarseMap& map) {
  Eigen::MatrixXd m = logits;
  return aggregate_fine_to_coarse(m, map).row(0);
}

nlohmann::json checkpoint(const Mlp& net) {
  nlohmann::json j;
  j["widths"] = net.widths();
  nlohmann::json ws = nlohmann::json::array();
  nlohmann::json bs = nlohmann::json::array();
  for (int l = 0; l < net.layer_count(); ++l) {
    const auto& w = net.weights[static_cast<std::size_t>(l)];
    std::vector<double> flat(static_cast<std::size_t>(w.size()));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        flat[static_cast<std::size_t>(i * w.cols() + c)] = w(i, c);  // row-major
    ws.push_back(flat);
    const auto& b = net.biases[static_cast<std::size_t>(l)];
    bs.push_back(std::vector<double>(b.data(), b.data() + b.size()));
  }
  j["weights"] = std::move(ws);
  j["biases"] = std::move(bs);
  return j;
}

Mlp from_checkpoint(const nlohmann::json& j) {
  Mlp net;
  auto widths = j.at("widths").get<std::vector<int>>();
  net.set_widths(widths);
  const auto& ws = j.at("weights");
  const auto& bs = j.at("biases");
  require(ws.size() == widths.size() - 1 && bs.size() == widths.size() - 1, errc::bad_format,
          "checkpoint: layer count mismatch");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    auto flat = ws[l].get<std::vector<double>>();
    int rows = widths[l], cols = widths[l + 1];
    require(static_cast<int>(flat.size()) == rows * cols, errc::bad_format,
            "checkpoint: weight shape mismatch");
    Eigen::MatrixXd w(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int c = 0; c < cols; ++c) w(i, c) = flat[static_cast<std::size_t>(i * cols + c)];
    net.weights.push_back(std::move(w));
    auto bias = bs[l].get<std::vector<double>>();
    require(static_cast<int>(bias.size()) == cols, errc::bad_format, "checkpoint: bias shape mismatch");
    net.biases.push_back(Eigen::Map<Eigen::RowVectorXd>(bias.data(), cols));
  }
  return net;
}

Eigen::MatrixXd dataset_matrix(const TrainView& data) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(data.size()), data.dim());
  for (std::size_t i = 0; i < data.size(); ++i)
    for (int j = 0; j < data.dim(); ++j) m(static_cast<Eigen::Index>(i), j) = data.x(i)[static_cast<std::size_t>(j)];
  return m;
}

std::vector<int> dataset_labels(const TrainView& data) {
  std::vector<int> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) y[i] = data.y(i);
  return y;
}

}  // namespace lab::nn
