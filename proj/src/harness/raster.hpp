#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dist/models.hpp"

namespace lab::harness {

/// Class-id grid over an axis-aligned window, row 0 at y_lo.
struct BoundaryRaster {
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  int resolution = 256;
  std::vector<int> classes;  // resolution * resolution entries, row-major

  int at(int row, int col) const { return classes[static_cast<std::size_t>(row) * resolution + col]; }
};

BoundaryRaster rasterize(const std::function<int(double, double)>& predict, double x_lo, double x_hi,
                         double y_lo, double y_hi, int resolution);

/// ASCII PGM (P2), classes spread over the gray range; plus a plain CSV grid.
void raster_to_pgm(const BoundaryRaster& r, int num_classes, const std::string& path,
                   const std::string& comment);
void raster_to_csv(const BoundaryRaster& r, const std::string& path, const std::string& comment);

/// Smallest gap between a blob's rim and any decision-boundary cell edge of
/// the raster; 0 when the boundary cuts through the blob.
double min_boundary_distance(const BoundaryRaster& r, const dist::Circle& blob);

}  // namespace lab::harness
