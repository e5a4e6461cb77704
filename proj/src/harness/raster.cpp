#include "harness/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "core/error.hpp"

namespace lab::harness {

BoundaryRaster rasterize(const std::function<int(double, double)>& predict, double x_lo, double x_hi,
                         double y_lo, double y_hi, int resolution) {
  require(resolution >= 2, errc::invalid_argument, "rasterize: resolution must be >= 2");
  require(x_lo < x_hi && y_lo < y_hi, errc::invalid_argument, "rasterize: degenerate window");
  BoundaryRaster r{x_lo, x_hi, y_lo, y_hi, resolution, {}};
  r.classes.resize(static_cast<std::size_t>(resolution) * resolution);
  for (int row = 0; row < resolution; ++row) {
    double y = y_lo + (y_hi - y_lo) * (row + 0.5) / resolution;
    for (int col = 0; col < resolution; ++col) {
      double x = x_lo + (x_hi - x_lo) * (col + 0.5) / resolution;
      r.classes[static_cast<std::size_t>(row) * resolution + col] = predict(x, y);
    }
  }
  return r;
}

void raster_to_pgm(const BoundaryRaster& r, int num_classes, const std::string& path,
                   const std::string& comment) {
  require(num_classes >= 2, errc::invalid_argument, "raster_to_pgm: need >= 2 classes");
  std::ofstream f(path);
  require(f.good(), errc::io_failure, "cannot open for writing: " + path);
  f << "P2\n";
  if (!comment.empty()) f << "# " << comment << '\n';
  f << r.resolution << ' ' << r.resolution << "\n255\n";
  for (int row = 0; row < r.resolution; ++row) {
    for (int col = 0; col < r.resolution; ++col) {
      int c = std::clamp(r.at(row, col), 0, num_classes - 1);
      int gray = c * 255 / (num_classes - 1);
      f << gray << (col + 1 == r.resolution ? '\n' : ' ');
    }
  }
  require(f.good(), errc::io_failure, "write failed: " + path);
}

void raster_to_csv(const BoundaryRaster& r, const std::string& path, const std::string& comment) {
  std::ofstream f(path);
  require(f.good(), errc::io_failure, "cannot open for writing: " + path);
  if (!comment.empty()) f << "# " << comment << '\n';
  for (int row = 0; row < r.resolution; ++row) {
    for (int col = 0; col < r.resolution; ++col)
      f << r.at(row, col) << (col + 1 == r.resolution ? '\n' : ',');
  }
  require(f.good(), errc::io_failure, "write failed: " + path);
}

double min_boundary_distance(const BoundaryRaster& r, const dist::Circle& blob) {
  double best = std::numeric_limits<double>::infinity();
  const double dx = (r.x_hi - r.x_lo) / r.resolution;
  const double dy = (r.y_hi - r.y_lo) / r.resolution;
  auto center_of = [&](int row, int col) {
    return Point{r.x_lo + (col + 0.5) * dx, r.y_lo + (row + 0.5) * dy};
  };
  for (int row = 0; row < r.resolution; ++row) {
    for (int col = 0; col < r.resolution; ++col) {
      bool boundary = (col + 1 < r.resolution && r.at(row, col) != r.at(row, col + 1)) ||
                      (row + 1 < r.resolution && r.at(row, col) != r.at(row + 1, col));
      if (!boundary) continue;
      Point p = center_of(row, col);
      double gap = std::sqrt(squared_distance(p, blob.center)) - blob.radius;
      best = std::min(best, std::max(0.0, gap));
    }
  }
  return std::isfinite(best) ? best : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace lab::harness
