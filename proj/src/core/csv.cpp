#include "core/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "core/error.hpp"

namespace lab {

std::string format_double(double v) {
  // Shortest decimal that parses back exactly; 17 significant digits always do.
  char buf[40];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void dataset_to_csv(const Dataset& ds, std::ostream& out) {
  for (int j = 0; j < ds.dim(); ++j) out << 'x' << j << ',';
  out << "y,flipped\n";
  for (const Sample& s : ds.samples()) {
    for (double v : s.x.coords) out << format_double(v) << ',';
    out << s.label << ',' << (s.flipped ? 1 : 0) << '\n';
  }
}

void dataset_to_csv(const Dataset& ds, const std::string& path) {
  std::ofstream f(path);
  require(f.good(), errc::io_failure, "cannot open for writing: " + path);
  dataset_to_csv(ds, f);
  require(f.good(), errc::io_failure, "write failed: " + path);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  require(end && *end == '\0' && !s.empty(), errc::bad_format, "bad numeric field: '" + s + "'");
  return v;
}

}  // namespace

Dataset dataset_from_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), errc::bad_format, "empty CSV");
  auto header = split_fields(line);
  require(header.size() >= 3, errc::bad_format, "dataset CSV header too short");
  require(header[header.size() - 2] == "y" && header.back() == "flipped", errc::bad_format,
          "dataset CSV header must end with y,flipped");
  const int dim = static_cast<int>(header.size()) - 2;

  std::vector<Sample> samples;
  int max_label = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_fields(line);
    require(static_cast<int>(fields.size()) == dim + 2, errc::bad_format, "dataset CSV row arity mismatch");
    Sample s;
    s.x.coords.resize(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) s.x.coords[static_cast<std::size_t>(j)] = parse_double(fields[static_cast<std::size_t>(j)]);
    s.label = static_cast<int>(parse_double(fields[static_cast<std::size_t>(dim)]));
    s.flipped = parse_double(fields[static_cast<std::size_t>(dim) + 1]) != 0.0;
    max_label = std::max(max_label, s.label);
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(samples), dim, max_label + 1);
}

Dataset dataset_from_csv(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), errc::io_failure, "cannot open for reading: " + path);
  return dataset_from_csv(f);
}

}  // namespace lab
