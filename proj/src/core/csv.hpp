#pragma once

#include <iosfwd>
#include <string>

#include "core/types.hpp"

namespace lab {

/// Render a double with enough digits (17 significant) to round-trip exactly.
std::string format_double(double v);

/// Dataset CSV: header `x0,...,x{d-1},y,flipped`, one row per sample.
void dataset_to_csv(const Dataset& ds, std::ostream& out);
void dataset_to_csv(const Dataset& ds, const std::string& path);
Dataset dataset_from_csv(std::istream& in);
Dataset dataset_from_csv(const std::string& path);

}  // namespace lab
