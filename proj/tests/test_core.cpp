#include <doctest.h>

#include <cmath>
#include <sstream>

#include "core/bits.hpp"
#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/noise.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

using namespace lab;

namespace {

Dataset tiny_binary(std::size_t m, Seed seed) {
  Rng rng(seed);
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < m; ++i) {
    Sample s;
    s.x = Point{rng.next_double(), rng.next_double() - 0.5};
    s.label = static_cast<int>(rng.next_below(2));
    samples.push_back(s);
  }
  return Dataset(std::move(samples), 2, 2);
}

}  // namespace

TEST_CASE("round_nearest rounds halves away from zero") {
  CHECK(round_nearest(2.9) == 3);
  CHECK(round_nearest(3.1) == 3);
  CHECK(round_nearest(2.5) == 3);
  CHECK(round_nearest(-2.5) == -3);
  CHECK(round_nearest(0.5) == 1);
  CHECK(round_nearest(-0.49) == 0);
  CHECK(round_nearest(0.0) == 0);
  CHECK_THROWS_AS(round_nearest(std::nan("")), Error);
  CHECK_THROWS_AS(round_nearest(INFINITY), Error);
}

TEST_CASE("bits_of little-endian examples") {
  CHECK(bits_of(3, 3) == std::vector<std::uint8_t>{1, 1, 0});
  CHECK(bits_of(0, 4) == std::vector<std::uint8_t>{0, 0, 0, 0});
  CHECK(bits_of(4, 3) == std::vector<std::uint8_t>{0, 0, 1});
  CHECK_THROWS_AS(bits_of(8, 3), Error);
  CHECK_THROWS_AS(bits_of(1, 0), Error);
}

TEST_CASE("bits_of round-trips") {
  for (int n = 1; n <= 10; ++n)
    for (std::uint64_t i = 0; i < (1ULL << n); ++i) CHECK(uint_of_bits(bits_of(i, n)) == i);
  Rng rng(Seed{7});
  for (int rep = 0; rep < 100; ++rep) {
    std::uint64_t i = rng.next_below(1ULL << 40);
    CHECK(uint_of_bits(bits_of(i, 40)) == i);
  }
}

TEST_CASE("inject_label_noise edge probabilities") {
  Dataset ds = tiny_binary(64, Seed{3});
  Dataset same = inject_label_noise(ds, 0.0, Seed{11});
  Dataset all = inject_label_noise(ds, 1.0, Seed{11});
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(same[i].label == ds[i].label);
    CHECK_FALSE(same[i].flipped);
    CHECK(all[i].label == 1 - ds[i].label);
    CHECK(all[i].flipped);
    CHECK(all[i].x.coords == ds[i].x.coords);
  }
}

TEST_CASE("inject_label_noise flip fraction concentrates") {
  // Binomial(10000, 1/2): four sigmas is 0.02.
  Dataset ds = tiny_binary(10000, Seed{5});
  Dataset noisy = inject_label_noise(ds, 0.5, Seed{17});
  double fraction = static_cast<double>(noisy.flipped_count()) / static_cast<double>(noisy.size());
  CHECK(fraction >= 0.48);
  CHECK(fraction <= 0.52);
}

TEST_CASE("inject_label_noise is deterministic and validates") {
  Dataset ds = tiny_binary(100, Seed{9});
  Dataset a = inject_label_noise(ds, 0.3, Seed{42});
  Dataset b = inject_label_noise(ds, 0.3, Seed{42});
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(a[i].label == b[i].label);
    CHECK(a[i].flipped == b[i].flipped);
  }
  CHECK_THROWS_AS(inject_label_noise(ds, -0.1, Seed{1}), Error);
  CHECK_THROWS_AS(inject_label_noise(ds, 1.1, Seed{1}), Error);
}

TEST_CASE("dataset CSV round-trips doubles exactly") {
  Rng rng(Seed{23});
  std::vector<Sample> samples;
  for (int i = 0; i < 50; ++i) {
    Sample s;
    s.x = Point{1.0 / 3.0 * rng.next_double(), std::ldexp(rng.next_double(), -30)};
    s.label = static_cast<int>(rng.next_below(2));
    s.flipped = rng.next_below(2) == 1;
    samples.push_back(s);
  }
  Dataset ds(std::move(samples), 2, 2);

  std::stringstream buf;
  dataset_to_csv(ds, buf);
  Dataset back = dataset_from_csv(buf);
  REQUIRE(back.size() == ds.size());
  CHECK(back.dim() == ds.dim());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back[i].x.coords == ds[i].x.coords);
    CHECK(back[i].label == ds[i].label);
    CHECK(back[i].flipped == ds[i].flipped);
  }
}

TEST_CASE("dataset CSV rejects malformed input") {
  std::stringstream missing_header("x0,y\n0.5,1\n");
  CHECK_THROWS_AS(dataset_from_csv(missing_header), Error);
  std::stringstream bad_arity("x0,y,flipped\n0.5,1\n");
  CHECK_THROWS_AS(dataset_from_csv(bad_arity), Error);
  std::stringstream bad_field("x0,y,flipped\nabc,1,0\n");
  CHECK_THROWS_AS(dataset_from_csv(bad_field), Error);
}

TEST_CASE("rng streams are reproducible and split streams diverge") {
  Rng a(Seed{1234});
  Rng b(Seed{1234});
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(Seed{1234});
  Rng d = c.split();
  bool differs = false;
  for (int i = 0; i < 10; ++i) differs |= c.next_u64() != d.next_u64();
  CHECK(differs);
}

TEST_CASE("dataset invariants are enforced") {
  std::vector<Sample> bad_label = {{Point{0.0}, 3, false}};
  CHECK_THROWS_AS(Dataset(bad_label, 1, 2), Error);
  std::vector<Sample> bad_dim = {{Point{0.0, 1.0}, 0, false}};
  CHECK_THROWS_AS(Dataset(bad_dim, 1, 2), Error);
  std::vector<Sample> nonfinite = {{Point{std::nan("")}, 0, false}};
  CHECK_THROWS_AS(Dataset(nonfinite, 1, 2), Error);
}
