#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "core/rng.hpp"
#include "harness/config.hpp"

namespace lab::harness {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::string out_dir;                // empty: take the config's `out`
  std::optional<std::uint64_t> seed;  // overrides the config's `seed`
  int threads = 0;                    // <= 0: config value; LAB_THREADS env wins over both
};

struct RunContext {
  std::string experiment;
  std::string out_dir;
  std::uint64_t base_seed = 0;
  int threads = 1;
  std::string hash;

  std::string stamp() const;
  std::string path(const std::string& filename) const;
};

/// Validate, resolve options, create the output directory, dispatch.
void run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

void run_noise_sweep(const ExperimentConfig& cfg, const RunContext& ctx);
void run_representation_duel(const ExperimentConfig& cfg, const RunContext& ctx);
void run_learner_verification(const ExperimentConfig& cfg, const RunContext& ctx);
void run_infected_balls(const ExperimentConfig& cfg, const RunContext& ctx);
void run_boundary_raster(const ExperimentConfig& cfg, const RunContext& ctx);
void run_fine2coarse(const ExperimentConfig& cfg, const RunContext& ctx);
void run_majority_mc(const ExperimentConfig& cfg, const RunContext& ctx);

/// Stable per-cell seed derivation from the base seed and sweep indices.
Seed derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace lab::harness
