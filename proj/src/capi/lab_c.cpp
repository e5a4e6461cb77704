#include "lab/lab.h"

#include <string>

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/noise.hpp"
#include "harness/config.hpp"
#include "harness/experiments.hpp"

namespace {

thread_local std::string g_last_error;

lab_status status_of(lab::errc code) {
  switch (code) {
    case lab::errc::config: return LAB_ERR_CONFIG;
    case lab::errc::io_failure: return LAB_ERR_IO;
    case lab::errc::invalid_argument:
    case lab::errc::out_of_range: return LAB_ERR_INVALID_ARGUMENT;
    default: return LAB_ERR_RUNTIME;
  }
}

template <class Fn>
lab_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return LAB_OK;
  } catch (const lab::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LAB_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown failure";
    return LAB_ERR_RUNTIME;
  }
}

}  // namespace

struct lab_config {
  lab::harness::ExperimentConfig cfg;
};

struct lab_dataset {
  lab::Dataset ds;
};

extern "C" {

const char* lab_version(void) { return lab::harness::kVersion; }

const char* lab_last_error(void) { return g_last_error.c_str(); }

lab_status lab_config_open(const char* path, lab_config** out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return LAB_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&] { *out = new lab_config{lab::harness::load_config(path)}; });
}

lab_status lab_config_parse(const char* text, lab_config** out) {
  if (!text || !out) {
    g_last_error = "null argument";
    return LAB_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&] { *out = new lab_config{lab::harness::parse_config(text)}; });
}

void lab_config_close(lab_config* cfg) { delete cfg; }

const char* lab_config_experiment(const lab_config* cfg) {
  return cfg ? cfg->cfg.experiment.c_str() : "";
}

lab_status lab_config_validate(const lab_config* cfg) {
  if (!cfg) {
    g_last_error = "null config";
    return LAB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { lab::harness::validate_config(cfg->cfg); });
}

lab_status lab_run(const lab_config* cfg, const lab_run_options* opts) {
  if (!cfg) {
    g_last_error = "null config";
    return LAB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    lab::harness::RunOptions run;
    if (opts) {
      if (opts->out_dir) run.out_dir = opts->out_dir;
      if (opts->has_seed) run.seed = opts->seed;
      run.threads = opts->threads;
    }
    lab::harness::run_experiment(cfg->cfg, run);
  });
}

lab_status lab_dataset_from_csv(const char* path, lab_dataset** out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return LAB_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&] { *out = new lab_dataset{lab::dataset_from_csv(path)}; });
}

lab_status lab_dataset_to_csv(const lab_dataset* ds, const char* path) {
  if (!ds || !path) {
    g_last_error = "null argument";
    return LAB_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { lab::dataset_to_csv(ds->ds, path); });
}

lab_status lab_dataset_inject_noise(const lab_dataset* ds, double eta, uint64_t seed,
                                    lab_dataset** out) {
  if (!ds || !out) {
    g_last_error = "null argument";
    return LAB_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded(
      [&] { *out = new lab_dataset{lab::inject_label_noise(ds->ds, eta, lab::Seed{seed})}; });
}

size_t lab_dataset_size(const lab_dataset* ds) { return ds ? ds->ds.size() : 0; }

int lab_dataset_dim(const lab_dataset* ds) { return ds ? ds->ds.dim() : 0; }

size_t lab_dataset_flipped_count(const lab_dataset* ds) { return ds ? ds->ds.flipped_count() : 0; }

void lab_dataset_close(lab_dataset* ds) { delete ds; }

}  // extern "C"
