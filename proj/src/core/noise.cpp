#include "core/noise.hpp"

#include "core/error.hpp"

namespace lab {

Dataset inject_label_noise(const Dataset& ds, double eta, Seed seed) {
  require(eta >= 0.0 && eta <= 1.0, errc::invalid_argument, "inject_label_noise: eta outside [0,1]");
  require(ds.num_classes() == 2, errc::invalid_argument, "inject_label_noise: dataset must be binary");

  Rng rng(seed);
  std::vector<Sample> out;
  out.reserve(ds.size());
  for (const Sample& s : ds.samples()) {
    Sample t = s;
    if (rng.next_double() < eta) {
      t.label = 1 - t.label;
      t.flipped = !t.flipped;
    }
    out.push_back(std::move(t));
  }
  return Dataset(std::move(out), ds.dim(), ds.num_classes());
}

}  // namespace lab
