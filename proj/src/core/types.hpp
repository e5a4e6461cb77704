#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "core/error.hpp"

namespace lab {

/// A point in R^d.
struct Point {
  std::vector<double> coords;

  Point() = default;
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c) : coords(c) {}

  int dim() const { return static_cast<int>(coords.size()); }
  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }

  bool finite() const {
    for (double v : coords)
      if (!std::isfinite(v)) return false;
    return !coords.empty();
  }
};

inline double squared_distance(const Point& a, const Point& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    double d = a.coords[i] - b.coords[i];
    s += d * d;
  }
  return s;
}

/// A labelled example. `flipped` records noise provenance for analysis only;
/// learners are handed a TrainView, which does not expose it.
struct Sample {
  Point x;
  int label = 0;
  bool flipped = false;
};

class Dataset {
public:
  Dataset() = default;
  Dataset(std::vector<Sample> samples, int dim, int num_classes)
      : samples_(std::move(samples)), dim_(dim), num_classes_(num_classes) {
    require(dim_ >= 1, errc::invalid_argument, "dataset dimension must be >= 1");
    require(num_classes_ >= 2, errc::invalid_argument, "dataset needs >= 2 classes");
    for (const Sample& s : samples_) {
      require(s.x.dim() == dim_, errc::invalid_argument, "sample dimension mismatch");
      require(s.x.finite(), errc::invalid_argument, "sample has non-finite coordinate");
      require(s.label >= 0 && s.label < num_classes_, errc::invalid_argument,
              "label outside declared class range");
    }
  }

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  int dim() const { return dim_; }
  int num_classes() const { return num_classes_; }

  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<Sample>& samples() const { return samples_; }

  std::size_t flipped_count() const {
    std::size_t n = 0;
    for (const Sample& s : samples_) n += s.flipped ? 1 : 0;
    return n;
  }

private:
  std::vector<Sample> samples_;
  int dim_ = 1;
  int num_classes_ = 2;
};

/// What a learner is allowed to see: points and labels, no provenance flags.
class TrainView {
public:
  TrainView(const Dataset& ds) : ds_(&ds) {}  // NOLINT: implicit by design of call sites

  std::size_t size() const { return ds_->size(); }
  bool empty() const { return ds_->empty(); }
  int dim() const { return ds_->dim(); }
  int num_classes() const { return ds_->num_classes(); }
  const Point& x(std::size_t i) const { return (*ds_)[i].x; }
  int y(std::size_t i) const { return (*ds_)[i].label; }

private:
  const Dataset* ds_;
};

}  // namespace lab
