#include "harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/noise.hpp"
#include "dist/models.hpp"
#include "learn/bounds.hpp"
#include "learn/learners.hpp"
#include "nn/train.hpp"
#include "harness/raster.hpp"
#include "risk/evaluators.hpp"

namespace lab::harness {

namespace {

// ---------------------------------------------------------------- schemas

enum class Kind { integer, number, boolean, string, numbers, strings };

struct KeySpec {
  const char* name;
  Kind kind;
  bool required = false;
};

struct SectionSpec {
  const char* name;
  std::vector<KeySpec> keys;
};

struct ExperimentSpec {
  const char* id;
  std::vector<SectionSpec> sections;
};

const std::vector<KeySpec> kTopKeys = {
    {"trials", Kind::integer}, {"seed", Kind::integer}, {"out", Kind::string}, {"threads", Kind::integer}};

const std::vector<KeySpec> kAttackKeys = {{"norm", Kind::string},       {"gamma", Kind::number},
                                          {"steps", Kind::integer},     {"step_size", Kind::number},
                                          {"random_start", Kind::boolean}, {"restarts", Kind::integer}};

const std::vector<KeySpec> kNetKeys = {{"hidden", Kind::numbers},
                                       {"batch", Kind::integer},
                                       {"epochs", Kind::integer},
                                       {"lr_schedule", Kind::string},
                                       {"shuffle", Kind::boolean}};

const ExperimentSpec kSpecs[] = {
    {"noise-sweep",
     {{"distribution",
       {{"kind", Kind::string, true},
        {"dim", Kind::integer},
        {"mnist_images", Kind::string},
        {"mnist_labels", Kind::string},
        {"digit_a", Kind::integer},
        {"digit_b", Kind::integer}}},
      {"net", kNetKeys},
      {"attack", kAttackKeys},
      {"sweep",
       {{"sigmas", Kind::numbers, true},
        {"etas", Kind::numbers, true},
        {"train_m", Kind::integer},
        {"test_m", Kind::integer}}}}},
    {"representation-duel",
     {{"distribution",
       {{"kind", Kind::string, true},
        {"r", Kind::number},
        {"k", Kind::integer},
        {"orientation", Kind::integer}}},
      {"learner", {{"train_m", Kind::integer}, {"max_epochs", Kind::integer}}},
      {"sweep", {{"gammas", Kind::numbers, true}}}}},
    {"learner-verification",
     {{"distribution",
       {{"kind", Kind::string, true},
        {"n", Kind::integer},
        {"parity_set", Kind::numbers, true},
        {"zeta", Kind::numbers}}},
      {"sweep",
       {{"eta", Kind::number, true},
        {"gammas", Kind::numbers, true},
        {"delta", Kind::number},
        {"bound_gamma", Kind::number}}}}},
    {"infected-balls",
     {{"distribution",
       {{"kind", Kind::string, true},
        {"n", Kind::integer},
        {"parity_set", Kind::numbers, true},
        {"zeta", Kind::numbers}}},
      {"sweep",
       {{"eta", Kind::number},
        {"delta", Kind::number},
        {"c2", Kind::number},
        {"gamma", Kind::number},
        {"threshold", Kind::number}}}}},
    {"boundary-raster",
     {{"distribution",
       {{"kind", Kind::string, true},
        {"circle_x", Kind::numbers},
        {"circle_y", Kind::numbers},
        {"circle_r", Kind::numbers},
        {"circle_label", Kind::numbers},
        {"circle_weight", Kind::numbers}}},
      {"net",
       {{"epochs", Kind::integer},
        {"batch", Kind::integer},
        {"lr_schedule", Kind::string},
        {"train_m", Kind::integer}}},
      {"attack", kAttackKeys},
      {"raster",
       {{"resolution", Kind::integer},
        {"x_lo", Kind::number},
        {"x_hi", Kind::number},
        {"y_lo", Kind::number},
        {"y_hi", Kind::number}}}}},
    {"fine2coarse",
     {{"distribution",
       {{"kind", Kind::string, true},
        {"r", Kind::number},
        {"k", Kind::integer},
        {"orientation", Kind::integer}}},
      {"net", kNetKeys},
      {"attack", kAttackKeys},
      {"sweep",
       {{"gammas", Kind::numbers, true},
        {"train_m", Kind::integer},
        {"test_m", Kind::integer},
        {"grid_resolution", Kind::integer}}}}},
    {"majority-mc",
     {{"sweep",
       {{"eta", Kind::number},
        {"delta1", Kind::number},
        {"zeta", Kind::integer},
        {"k", Kind::integer},
        {"delta2", Kind::number},
        {"reps", Kind::integer},
        {"m_factors", Kind::numbers}}}}},
};

bool value_matches(const Value& v, Kind kind) {
  switch (kind) {
    case Kind::integer: return std::holds_alternative<std::int64_t>(v);
    case Kind::number:
      return std::holds_alternative<double>(v) || std::holds_alternative<std::int64_t>(v);
    case Kind::boolean: return std::holds_alternative<bool>(v);
    case Kind::string: return std::holds_alternative<std::string>(v);
    case Kind::numbers: return std::holds_alternative<std::vector<double>>(v);
    case Kind::strings: return std::holds_alternative<std::vector<std::string>>(v);
  }
  return false;
}

void check_table(const Table& table, const std::vector<KeySpec>& keys, const std::string& where,
                 std::vector<std::string>& problems) {
  for (const auto& [key, value] : table) {
    auto it = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return key == k.name; });
    if (it == keys.end()) {
      problems.push_back("unknown key '" + key + "' in " + where);
      continue;
    }
    if (!value_matches(value, it->kind)) problems.push_back("wrong type for '" + key + "' in " + where);
  }
  for (const KeySpec& k : keys) {
    if (k.required && table.find(k.name) == table.end())
      problems.push_back("missing required key '" + std::string(k.name) + "' in " + where);
  }
}

const ExperimentSpec* find_spec(const std::string& id) {
  for (const auto& spec : kSpecs)
    if (id == spec.id) return &spec;
  return nullptr;
}

// ---------------------------------------------------------------- helpers

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

risk::AttackConfig parse_attack(const Table& t, const risk::AttackConfig& defaults) {
  risk::AttackConfig cfg = defaults;
  std::string norm = get_string(t, "norm", cfg.norm == risk::Norm::sup ? "linf" : "l2");
  require(norm == "linf" || norm == "l2", errc::config, "attack norm must be 'linf' or 'l2'");
  cfg.norm = norm == "linf" ? risk::Norm::sup : risk::Norm::euclidean;
  cfg.gamma = get_double(t, "gamma", cfg.gamma);
  cfg.steps = static_cast<int>(get_int(t, "steps", cfg.steps));
  cfg.step_size = get_double(t, "step_size", cfg.step_size);
  cfg.random_start = get_bool(t, "random_start", cfg.random_start);
  cfg.restarts = static_cast<int>(get_int(t, "restarts", cfg.restarts));
  return cfg;
}

std::vector<std::pair<int, double>> parse_lr_schedule(const std::string& text) {
  std::vector<std::pair<int, double>> schedule;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    std::size_t colon = cur.find(':');
    require(colon != std::string::npos, errc::config, "lr_schedule entries are 'epoch:rate'");
    schedule.emplace_back(std::stoi(cur.substr(0, colon)), std::stod(cur.substr(colon + 1)));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',')
      flush();
    else if (!std::isspace(static_cast<unsigned char>(c)))
      cur.push_back(c);
  }
  flush();
  require(!schedule.empty(), errc::config, "lr_schedule is empty");
  return schedule;
}

nn::TrainConfig parse_net(const Table& t, const nn::TrainConfig& defaults) {
  nn::TrainConfig cfg = defaults;
  cfg.batch_size = static_cast<int>(get_int(t, "batch", cfg.batch_size));
  cfg.epochs = static_cast<int>(get_int(t, "epochs", cfg.epochs));
  cfg.shuffle = get_bool(t, "shuffle", cfg.shuffle);
  auto it = t.find("lr_schedule");
  if (it != t.end()) cfg.lr_schedule = parse_lr_schedule(std::get<std::string>(it->second));
  return cfg;
}

std::vector<int> parse_hidden(const Table& t, std::vector<int> fallback) {
  auto values = get_doubles(t, "hidden", std::vector<double>{});
  if (values.empty()) return fallback;
  std::vector<int> hidden;
  for (double v : values) hidden.push_back(static_cast<int>(v));
  return hidden;
}

dist::ParityBallModel parse_parity_balls(const Table& t, const dist::ParityBallModel& defaults) {
  require(get_string(t, "kind") == "parity-balls", errc::config,
          "this experiment needs [distribution] kind = \"parity-balls\"");
  dist::ParityBallModel m = defaults;
  m.radius = get_double(t, "r", m.radius);
  m.lattice_count = static_cast<int>(get_int(t, "k", m.lattice_count));
  m.orientation = static_cast<int>(get_int(t, "orientation", m.orientation));
  dist::validate(m);
  return m;
}

dist::IntervalParityModel parse_interval_parity(const Table& t, std::uint64_t base_seed) {
  require(get_string(t, "kind") == "interval-parity", errc::config,
          "this experiment needs [distribution] kind = \"interval-parity\"");
  int n = static_cast<int>(get_int(t, "n", 8));
  std::vector<int> parity_set;
  for (double v : get_doubles(t, "parity_set")) parity_set.push_back(static_cast<int>(v));
  auto zeta_values = get_doubles(t, "zeta", std::vector<double>{});
  if (zeta_values.empty())
    // Support is part of the experiment identity: derive it from the base
    // seed, not the trial seed.
    return dist::random_interval_parity(n, std::move(parity_set), derive_seed(base_seed, 0x5eed));
  std::vector<std::int64_t> zeta;
  for (double v : zeta_values) zeta.push_back(static_cast<std::int64_t>(v));
  return dist::make_interval_parity(n, std::move(parity_set), std::move(zeta));
}

void write_csv(const RunContext& ctx, const std::string& filename, const std::string& header,
               const std::vector<std::string>& rows, const std::vector<std::string>& notes = {}) {
  std::ofstream f(ctx.path(filename));
  require(f.good(), errc::io_failure, "cannot open for writing: " + ctx.path(filename));
  f << "# " << ctx.stamp() << '\n';
  for (const auto& note : notes) f << "# " << note << '\n';
  f << header << '\n';
  for (const auto& row : rows) f << row << '\n';
  require(f.good(), errc::io_failure, "write failed: " + ctx.path(filename));
}

// Runs jobs 0..count-1 across the worker pool; results land in job order.
std::vector<std::vector<std::string>> run_jobs(
    std::size_t count, int threads, const std::function<std::vector<std::string>(std::size_t)>& job) {
  std::vector<std::vector<std::string>> results(count);
  int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = job(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          results[i] = job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<std::string> flatten(std::vector<std::vector<std::string>> blocks) {
  std::vector<std::string> rows;
  for (auto& block : blocks)
    for (auto& row : block) rows.push_back(std::move(row));
  return rows;
}

std::string fmt(double v) { return format_double(v); }

std::uint64_t fnv64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Seed derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  Rng rng(Seed{base ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xbf58476d1ce4e5b9ULL) ^
               (c * 0x94d049bb133111ebULL)});
  return Seed{rng.next_u64()};
}

std::string RunContext::stamp() const {
  // No worker count here: output bytes must not depend on scheduling.
  return "lab " + std::string(kVersion) + " experiment=" + experiment + " config_hash=" + hash +
         " base_seed=" + std::to_string(base_seed);
}

std::string RunContext::path(const std::string& filename) const {
  return (std::filesystem::path(out_dir) / filename).string();
}

void validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  const ExperimentSpec* spec = find_spec(cfg.experiment);
  if (cfg.experiment.empty()) problems.push_back("missing top-level 'experiment'");
  if (!spec && !cfg.experiment.empty()) problems.push_back("unknown experiment '" + cfg.experiment + "'");
  if (spec) {
    check_table(cfg.top, kTopKeys, "top level", problems);
    for (const auto& [name, table] : cfg.sections) {
      auto it = std::find_if(spec->sections.begin(), spec->sections.end(),
                             [&](const SectionSpec& s) { return name == s.name; });
      if (it == spec->sections.end()) {
        problems.push_back("unknown section [" + name + "]");
        continue;
      }
      check_table(table, it->keys, "[" + name + "]", problems);
    }
    for (const auto& section : spec->sections) {
      bool has_required = std::any_of(section.keys.begin(), section.keys.end(),
                                      [](const KeySpec& k) { return k.required; });
      if (has_required && cfg.sections.find(section.name) == cfg.sections.end())
        problems.push_back("missing section [" + std::string(section.name) + "]");
    }
  }
  if (!problems.empty()) fail(errc::config, join(problems, "; "));
}

void run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate_config(cfg);

  RunContext ctx;
  ctx.experiment = cfg.experiment;
  ctx.out_dir = opts.out_dir.empty() ? cfg.out_dir() : opts.out_dir;
  ctx.base_seed = opts.seed.value_or(cfg.base_seed());
  ctx.threads = opts.threads > 0 ? opts.threads : cfg.threads();
  if (const char* env = std::getenv("LAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) ctx.threads = static_cast<int>(v);
  }
  ctx.threads = std::max(1, ctx.threads);
  ctx.hash = config_hash(cfg);

  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  require(!ec, errc::io_failure, "cannot create output directory: " + ctx.out_dir);

  if (cfg.experiment == "noise-sweep") return run_noise_sweep(cfg, ctx);
  if (cfg.experiment == "representation-duel") return run_representation_duel(cfg, ctx);
  if (cfg.experiment == "learner-verification") return run_learner_verification(cfg, ctx);
  if (cfg.experiment == "infected-balls") return run_infected_balls(cfg, ctx);
  if (cfg.experiment == "boundary-raster") return run_boundary_raster(cfg, ctx);
  if (cfg.experiment == "fine2coarse") return run_fine2coarse(cfg, ctx);
  if (cfg.experiment == "majority-mc") return run_majority_mc(cfg, ctx);
  fail(errc::config, "unknown experiment '" + cfg.experiment + "'");
}

// ------------------------------------------------------------ noise sweep

void run_noise_sweep(const ExperimentConfig& cfg, const RunContext& ctx) {
  const Table& distribution = section_or_empty(cfg, "distribution");
  require(get_string(distribution, "kind") == "prototype", errc::config,
          "noise-sweep needs [distribution] kind = \"prototype\"");
  const Table& sweep = section_or_empty(cfg, "sweep");
  const Table& net_table = section_or_empty(cfg, "net");

  std::string source;
  Point proto_a, proto_b;
  if (distribution.count("mnist_images") || distribution.count("mnist_labels")) {
    auto pair = dist::load_mnist_prototypes(
        get_string(distribution, "mnist_images"), get_string(distribution, "mnist_labels"),
        static_cast<int>(get_int(distribution, "digit_a", 0)),
        static_cast<int>(get_int(distribution, "digit_b", 1)), derive_seed(ctx.base_seed, 0xd161));
    proto_a = std::move(pair.first);
    proto_b = std::move(pair.second);
    source = "mnist";
  } else {
    int dim = static_cast<int>(get_int(distribution, "dim", 64));
    auto pair = dist::synthetic_prototypes(dim);
    proto_a = std::move(pair.first);
    proto_b = std::move(pair.second);
    source = "synthetic dim=" + std::to_string(dim);
  }

  auto sigmas = get_doubles(sweep, "sigmas");
  auto etas = get_doubles(sweep, "etas");
  auto train_m = static_cast<std::size_t>(get_int(sweep, "train_m", 4000));
  auto test_m = static_cast<std::size_t>(get_int(sweep, "test_m", 1000));
  const auto trials = static_cast<std::size_t>(cfg.trials());

  nn::TrainConfig net_defaults;
  net_defaults.batch_size = 128;
  net_defaults.epochs = 400;
  net_defaults.lr_schedule = {{0, 0.1}};
  nn::TrainConfig net_cfg = parse_net(net_table, net_defaults);
  std::vector<int> hidden = parse_hidden(net_table, {256, 256, 256, 256});

  risk::AttackConfig attack_defaults;
  attack_defaults.norm = risk::Norm::sup;
  attack_defaults.gamma = 64.0 / 255.0;
  attack_defaults.steps = 400;
  attack_defaults.step_size = 0.01;
  risk::AttackConfig attack = parse_attack(section_or_empty(cfg, "attack"), attack_defaults);

  struct Cell {
    std::size_t si, ei, t;
  };
  std::vector<Cell> cells;
  for (std::size_t si = 0; si < sigmas.size(); ++si)
    for (std::size_t ei = 0; ei < etas.size(); ++ei)
      for (std::size_t t = 0; t < trials; ++t) cells.push_back({si, ei, t});

  auto blocks = run_jobs(cells.size(), ctx.threads, [&](std::size_t idx) {
    const Cell& cell = cells[idx];
    const double sigma = sigmas[cell.si];
    const double eta = etas[cell.ei];
    dist::PrototypeNoiseModel model{proto_a, proto_b, sigma};
    Dataset train = dist::sample_prototype(model, train_m, eta,
                                           derive_seed(ctx.base_seed ^ cell.t, cell.si, cell.ei, 1));
    Dataset test = dist::sample_prototype(model, test_m, 0.0,
                                          derive_seed(ctx.base_seed ^ cell.t, cell.si, cell.ei, 2));
    nn::TrainConfig train_cfg = net_cfg;
    train_cfg.seed = derive_seed(ctx.base_seed ^ cell.t, cell.si, cell.ei, 3);
    nn::TrainResult result = nn::train_natural(train, hidden, train_cfg);
    double train_err = nn::train_error(result.net, train);
    double test_err = nn::train_error(result.net, test);
    double adv_err = risk::empirical_adv_risk(result.net, test, attack);
    return std::vector<std::string>{fmt(sigma) + ',' + fmt(eta) + ',' + std::to_string(cell.t) + ',' +
                                    fmt(train_err) + ',' + fmt(test_err) + ',' + fmt(adv_err)};
  });

  write_csv(ctx, "noise_sweep.csv", "sigma,eta,trial,train_err,test_err,adv_err", flatten(std::move(blocks)),
            {"prototype_source=" + source,
             "net=" + std::to_string(hidden.size()) + "x" + std::to_string(hidden.empty() ? 0 : hidden[0]) +
                 " batch=" + std::to_string(net_cfg.batch_size) + " epoch_cap=" + std::to_string(net_cfg.epochs),
             "attack=pgd steps=" + std::to_string(attack.steps) + " gamma=" + fmt(attack.gamma) +
                 " step_size=" + fmt(attack.step_size)});
}

// --------------------------------------------------- representation duel

void run_representation_duel(const ExperimentConfig& cfg, const RunContext& ctx) {
  dist::ParityBallModel defaults;
  defaults.radius = 1.0 / (2.0 * std::sqrt(2.0)) - 0.008;
  defaults.lattice_count = 6;
  defaults.orientation = 1;
  dist::ParityBallModel model = parse_parity_balls(section_or_empty(cfg, "distribution"), defaults);

  const Table& learner = section_or_empty(cfg, "learner");
  auto train_m = static_cast<std::size_t>(get_int(learner, "train_m", 2000));
  int max_epochs = static_cast<int>(get_int(learner, "max_epochs", 10000));
  auto gammas = get_doubles(section_or_empty(cfg, "sweep"), "gammas");
  const auto trials = static_cast<std::size_t>(cfg.trials());

  learn::ParityHypothesis grid_parity;
  grid_parity.planar = true;
  grid_parity.orientation = model.orientation;

  auto blocks = run_jobs(trials, ctx.threads, [&](std::size_t t) {
    Dataset train = dist::sample_parity_balls(model, train_m, Seed{ctx.base_seed ^ t});
    auto separator = learn::fit_perceptron(train, max_epochs);

    std::vector<std::string> rows;
    for (double gamma : gammas) {
      if (separator) {
        double train_err = risk::natural_risk(
            [&](const Point& x) { return separator->predict(x); }, train);
        double natural = risk::exact_natural_risk_parity_balls(*separator, model);
        std::string adv = natural == 0.0
                              ? fmt(risk::exact_adv_risk_parity_balls(*separator, model, gamma))
                              : "nan";
        rows.push_back(std::to_string(t) + ",linear," + fmt(gamma) + ',' + fmt(natural) + ',' + adv +
                       ',' + fmt(train_err) + ",1");
      } else {
        rows.push_back(std::to_string(t) + ",linear," + fmt(gamma) + ",nan,nan,nan,0");
      }
      double parity_natural = risk::exact_natural_risk_parity_balls(grid_parity, model);
      double parity_adv = risk::exact_adv_risk_parity_balls(grid_parity, model, gamma);
      double parity_train = risk::natural_risk(
          [&](const Point& x) { return grid_parity.predict(x); }, train);
      rows.push_back(std::to_string(t) + ",parity," + fmt(gamma) + ',' + fmt(parity_natural) + ',' +
                     fmt(parity_adv) + ',' + fmt(parity_train) + ",1");
    }
    return rows;
  });

  write_csv(ctx, "representation_duel.csv", "trial,hypothesis,gamma,natural,adversarial,train_err,separated",
            flatten(std::move(blocks)),
            {"model=parity-balls r=" + fmt(model.radius) + " k=" + std::to_string(model.lattice_count) +
             " orientation=" + std::to_string(model.orientation) + " train_m=" + std::to_string(train_m)});
}

// ------------------------------------------------- learner verification

void run_learner_verification(const ExperimentConfig& cfg, const RunContext& ctx) {
  dist::IntervalParityModel model =
      parse_interval_parity(section_or_empty(cfg, "distribution"), ctx.base_seed);
  const Table& sweep = section_or_empty(cfg, "sweep");
  double eta = get_double(sweep, "eta");
  double delta = get_double(sweep, "delta", 0.1);
  double bound_gamma = get_double(sweep, "bound_gamma", 0.1);
  auto gammas = get_doubles(sweep, "gammas");
  const auto trials = static_cast<std::size_t>(cfg.trials());

  learn::SampleBound bound = learn::bound_thm3(model.bit_width, eta, bound_gamma, delta);
  const auto m = static_cast<std::size_t>(bound.value);

  auto blocks = run_jobs(trials, ctx.threads, [&](std::size_t t) {
    Dataset clean = dist::sample_interval_parity(model, m, derive_seed(ctx.base_seed ^ t, 1));
    Dataset noisy = inject_label_noise(clean, eta, derive_seed(ctx.base_seed ^ t, 2));

    std::vector<std::string> rows;

    learn::UnionOfIntervals union_h = learn::learn_union_intervals(noisy);
    risk::Region1 union_region = risk::decision_region_one(union_h);
    double union_train = learn::training_error(union_h, noisy);
    for (double gamma : gammas) {
      double natural = risk::exact_adv_risk_interval(union_region, model, 0.0);
      double adv = risk::exact_adv_risk_interval(union_region, model, gamma);
      rows.push_back(std::to_string(t) + ",union-intervals," + fmt(gamma) + ',' + std::to_string(m) +
                     ',' + fmt(union_train) + ',' + fmt(natural) + ',' + fmt(adv));
    }

    try {
      learn::ParityFit fit = learn::learn_parity(noisy, model.bit_width);
      double parity_train = risk::natural_risk(
          [&](const Point& x) { return fit.hypothesis.predict(x); }, noisy);
      risk::Region1 parity_region = risk::decision_region_one(
          fit.hypothesis, -1.0, static_cast<double>(std::int64_t(1) << model.bit_width) + 1.0);
      for (double gamma : gammas) {
        double natural = risk::exact_adv_risk_interval(parity_region, model, 0.0);
        double adv = risk::exact_adv_risk_interval(parity_region, model, gamma);
        rows.push_back(std::to_string(t) + ",parity," + fmt(gamma) + ',' + std::to_string(m) + ',' +
                       fmt(parity_train) + ',' + fmt(natural) + ',' + fmt(adv));
      }
    } catch (const Error&) {
      for (double gamma : gammas)
        rows.push_back(std::to_string(t) + ",parity," + fmt(gamma) + ',' + std::to_string(m) +
                       ",nan,nan,nan");
    }
    return rows;
  });

  write_csv(ctx, "learner_verification.csv", "trial,learner,gamma,m,train_err,natural,adversarial",
            flatten(std::move(blocks)),
            {"model=interval-parity n=" + std::to_string(model.bit_width) +
                 " zeta_size=" + std::to_string(model.centers.size()) + " eta=" + fmt(eta) +
                 " delta=" + fmt(delta) + " bound_gamma=" + fmt(bound_gamma),
             "m=" + std::to_string(bound.value) + " (thm3 bound)"});
}

// ----------------------------------------------------------- infected balls

void run_infected_balls(const ExperimentConfig& cfg, const RunContext& ctx) {
  dist::IntervalParityModel model =
      parse_interval_parity(section_or_empty(cfg, "distribution"), ctx.base_seed);
  const Table& sweep = section_or_empty(cfg, "sweep");
  double eta = get_double(sweep, "eta", 0.1);
  double delta = get_double(sweep, "delta", 0.05);
  const auto zeta_size = static_cast<int>(model.centers.size());
  double c2 = get_double(sweep, "c2", 1.0 / zeta_size);
  double gamma = get_double(sweep, "gamma", 0.5);  // 2 rho with rho = 1/4
  double threshold = get_double(sweep, "threshold", 0.95);
  const auto trials = static_cast<std::size_t>(cfg.trials());

  learn::SampleBound bound = learn::bound_infected(zeta_size, eta, c2, delta);
  const auto m = static_cast<std::size_t>(bound.value);

  auto blocks = run_jobs(trials, ctx.threads, [&](std::size_t t) {
    Dataset clean = dist::sample_interval_parity(model, m, derive_seed(ctx.base_seed ^ t, 3));
    Dataset noisy = inject_label_noise(clean, eta, derive_seed(ctx.base_seed ^ t, 4));
    learn::NearestNeighbor interpolator{noisy};
    risk::Region1 region = risk::decision_region_one(
        interpolator, -1.0, static_cast<double>(std::int64_t(1) << model.bit_width) + 1.0);
    double natural = risk::exact_adv_risk_interval(region, model, 0.0);
    double adv = risk::exact_adv_risk_interval(region, model, gamma);
    bool success = adv >= threshold;
    return std::vector<std::string>{std::to_string(t) + ',' + std::to_string(m) + ',' + fmt(eta) +
                                    ',' + fmt(natural) + ',' + fmt(adv) + ',' +
                                    (success ? "1" : "0")};
  });

  write_csv(ctx, "infected_balls.csv", "trial,m,eta,natural,adversarial,success",
            flatten(std::move(blocks)),
            {"model=interval-parity n=" + std::to_string(model.bit_width) +
             " zeta_size=" + std::to_string(zeta_size) + " c2=" + fmt(c2) + " delta=" + fmt(delta) +
             " gamma=" + fmt(gamma) + " threshold=" + fmt(threshold)});
}

// ---------------------------------------------------------- boundary raster

namespace {

dist::BlobWorld blob_world_from(const Table& t) {
  auto xs = get_doubles(t, "circle_x", std::vector<double>{});
  if (xs.empty()) {
    // Default layout: dominant circles plus rare small sub-populations, two
    // classes interleaved.
    dist::BlobWorld world;
    world.circles = {
        {Point{0.28, 0.72}, 0.15, 1, -1}, {Point{0.72, 0.62}, 0.15, 0, -1},
        {Point{0.24, 0.26}, 0.13, 0, -1}, {Point{0.66, 0.18}, 0.12, 1, -1},
        {Point{0.84, 0.90}, 0.045, 1, -1}, {Point{0.10, 0.50}, 0.045, 0, -1},
        {Point{0.50, 0.46}, 0.045, 1, -1}, {Point{0.47, 0.92}, 0.045, 0, -1},
    };
    dist::validate(world);
    return world;
  }
  auto ys = get_doubles(t, "circle_y");
  auto rs = get_doubles(t, "circle_r");
  auto labels = get_doubles(t, "circle_label");
  auto weights = get_doubles(t, "circle_weight", std::vector<double>(xs.size(), -1.0));
  require(ys.size() == xs.size() && rs.size() == xs.size() && labels.size() == xs.size() &&
              weights.size() == xs.size(),
          errc::config, "circle_* arrays must have equal lengths");
  dist::BlobWorld world;
  for (std::size_t i = 0; i < xs.size(); ++i)
    world.circles.push_back({Point{xs[i], ys[i]}, rs[i], static_cast<int>(labels[i]), weights[i]});
  dist::validate(world);
  return world;
}

}  // namespace

void run_boundary_raster(const ExperimentConfig& cfg, const RunContext& ctx) {
  dist::BlobWorld world = blob_world_from(section_or_empty(cfg, "distribution"));
  const Table& net_table = section_or_empty(cfg, "net");
  const Table& raster_table = section_or_empty(cfg, "raster");

  auto train_m = static_cast<std::size_t>(get_int(net_table, "train_m", 2000));
  nn::TrainConfig net_defaults;
  net_defaults.batch_size = 32;
  net_defaults.epochs = 200;
  net_defaults.lr_schedule = {{0, 0.1}};
  nn::TrainConfig net_cfg = parse_net(net_table, net_defaults);
  net_cfg.stop_at_zero_error = false;  // fixed-epoch regime

  risk::AttackConfig attack_defaults;
  attack_defaults.norm = risk::Norm::sup;
  attack_defaults.gamma = 0.06;
  attack_defaults.steps = 10;
  attack_defaults.step_size = 0.015;
  risk::AttackConfig attack = parse_attack(section_or_empty(cfg, "attack"), attack_defaults);

  int resolution = static_cast<int>(get_int(raster_table, "resolution", 256));
  double x_lo = get_double(raster_table, "x_lo", 0.0);
  double x_hi = get_double(raster_table, "x_hi", 1.0);
  double y_lo = get_double(raster_table, "y_lo", 0.0);
  double y_hi = get_double(raster_table, "y_hi", 1.0);

  Dataset train = dist::sample_blobs(world, train_m, derive_seed(ctx.base_seed, 0xb10b));
  const int classes = dist::blob_num_classes(world);

  struct Arch {
    const char* name;
    std::vector<int> hidden;
  };
  const std::vector<Arch> archs = {{"shallow", {100, 100}},
                                   {"shallow-wide", {1000, 1000}},
                                   {"deep", {100, 100, 100, 100}}};

  std::vector<std::string> margin_rows, model_rows;
  auto record = [&](const std::string& name, const std::string& mode,
                    const std::function<int(double, double)>& predict, double train_err) {
    BoundaryRaster raster = rasterize(predict, x_lo, x_hi, y_lo, y_hi, resolution);
    std::string base = "raster_" + name + "_" + mode;
    raster_to_pgm(raster, classes, ctx.path(base + ".pgm"), ctx.stamp());
    raster_to_csv(raster, ctx.path(base + ".csv"), ctx.stamp());
    for (std::size_t b = 0; b < world.circles.size(); ++b) {
      double margin = min_boundary_distance(raster, world.circles[b]);
      margin_rows.push_back(name + ',' + mode + ',' + std::to_string(b) + ',' +
                            std::to_string(world.circles[b].label) + ',' + fmt(margin));
    }
    model_rows.push_back(name + ',' + mode + ',' + fmt(train_err));
  };

  for (const Arch& arch : archs) {
    nn::TrainConfig cfg_nat = net_cfg;
    cfg_nat.seed = derive_seed(ctx.base_seed, 1, fnv64(arch.name));
    nn::TrainResult nat = nn::train_natural(train, arch.hidden, cfg_nat);
    record(arch.name, "nat",
           [&, net = nat.net](double x, double y) { return net.predict(Point{x, y}); },
           nn::train_error(nat.net, train));
    nn::trace_to_csv(nat.trace, ctx.path("trace_" + std::string(arch.name) + "_nat.csv"), ctx.stamp());

    nn::TrainResult adv = nn::train_adversarial(train, arch.hidden, cfg_nat, attack);
    record(arch.name, "at",
           [&, net = adv.net](double x, double y) { return net.predict(Point{x, y}); },
           nn::train_error(adv.net, train));
    nn::trace_to_csv(adv.trace, ctx.path("trace_" + std::string(arch.name) + "_at.csv"), ctx.stamp());
  }

  learn::NearestNeighbor nn1{train};
  record("1nn", "nat", [&](double x, double y) { return nn1.predict(Point{x, y}); },
         0.0);

  write_csv(ctx, "margins.csv", "model,training,blob,label,min_boundary_distance", margin_rows,
            {"attack gamma=" + fmt(attack.gamma) + " steps=" + std::to_string(attack.steps) +
             " step_size=" + fmt(attack.step_size),
             "train_m=" + std::to_string(train_m) + " epochs=" + std::to_string(net_cfg.epochs)});
  write_csv(ctx, "models.csv", "model,training,train_err", model_rows);
}

// -------------------------------------------------------------- fine2coarse

void run_fine2coarse(const ExperimentConfig& cfg, const RunContext& ctx) {
  dist::ParityBallModel defaults;
  defaults.radius = 0.3;
  defaults.lattice_count = 4;
  defaults.orientation = 1;
  dist::ParityBallModel model = parse_parity_balls(section_or_empty(cfg, "distribution"), defaults);

  const Table& sweep = section_or_empty(cfg, "sweep");
  auto gammas = get_doubles(sweep, "gammas");
  auto train_m = static_cast<std::size_t>(get_int(sweep, "train_m", 1000));
  auto test_m = static_cast<std::size_t>(get_int(sweep, "test_m", 1000));
  int resolution = static_cast<int>(get_int(sweep, "grid_resolution", 8));
  const auto trials = static_cast<std::size_t>(cfg.trials());

  nn::TrainConfig net_defaults;
  net_defaults.batch_size = 32;
  net_defaults.epochs = 300;
  net_defaults.lr_schedule = {{0, 0.1}};
  nn::TrainConfig net_cfg = parse_net(section_or_empty(cfg, "net"), net_defaults);
  net_cfg.stop_at_zero_error = false;
  std::vector<int> hidden = parse_hidden(section_or_empty(cfg, "net"), {100, 100, 100, 100});

  risk::AttackConfig attack_defaults;
  attack_defaults.norm = risk::Norm::sup;
  attack_defaults.gamma = 0.15;
  attack_defaults.steps = 10;
  attack_defaults.step_size = 0.03;
  risk::AttackConfig attack = parse_attack(section_or_empty(cfg, "attack"), attack_defaults);

  nn::CoarseMap to_binary{dist::parity_ball_fine_labels(model), 2};

  auto blocks = run_jobs(trials, ctx.threads, [&](std::size_t t) {
    Dataset fine = dist::sample_parity_balls_fine(model, train_m, derive_seed(ctx.base_seed ^ t, 10));
    Dataset binary = dist::relabel(fine, to_binary.fine_to_coarse, 2);
    Dataset eval = dist::sample_parity_balls(model, test_m, derive_seed(ctx.base_seed ^ t, 11));

    nn::TrainConfig cfg_t = net_cfg;
    cfg_t.seed = derive_seed(ctx.base_seed ^ t, 12);
    nn::TrainResult nat = nn::train_natural(binary, hidden, cfg_t);
    nn::TrainResult multi = nn::train_natural(fine, hidden, cfg_t);
    nn::TrainResult at = nn::train_adversarial(binary, hidden, cfg_t, attack);

    std::vector<std::string> rows;
    auto emit = [&](const char* name, const nn::Mlp& net, risk::Aggregate mode) {
      const nn::CoarseMap* map = mode == risk::Aggregate::none ? nullptr : &to_binary;
      double natural = risk::grid_adv_risk(net, eval, 0.0, attack.norm, 0, mode, map);
      for (double gamma : gammas) {
        double adv = risk::grid_adv_risk(net, eval, gamma, attack.norm, resolution, mode, map);
        rows.push_back(std::to_string(t) + ',' + name + ',' + fmt(gamma) + ',' + fmt(natural) + ',' +
                       fmt(adv));
      }
    };
    emit("nat", nat.net, risk::Aggregate::none);
    // The synthetic-figure rule reports the argmax fine class's coarse label;
    // the logit sum is the end-to-end differentiable variant.
    emit("multiclass", multi.net, risk::Aggregate::argmax_map);
    emit("multiclass-logitsum", multi.net, risk::Aggregate::logit_sum);
    emit("at", at.net, risk::Aggregate::none);
    return rows;
  });

  write_csv(ctx, "fine2coarse.csv", "trial,model,gamma,natural,adversarial", flatten(std::move(blocks)),
            {"model=parity-balls r=" + fmt(model.radius) + " k=" + std::to_string(model.lattice_count),
             "at gamma=" + fmt(attack.gamma) + " steps=" + std::to_string(attack.steps),
             "grid_resolution=" + std::to_string(resolution) + " test_m=" + std::to_string(test_m)});
}

// -------------------------------------------------------------- majority mc

void run_majority_mc(const ExperimentConfig& cfg, const RunContext& ctx) {
  const Table& sweep = section_or_empty(cfg, "sweep");
  double eta = get_double(sweep, "eta", 0.25);
  double delta1 = get_double(sweep, "delta1", 0.01);
  int zeta = static_cast<int>(get_int(sweep, "zeta", 4));
  int k = static_cast<int>(get_int(sweep, "k", 10));
  double delta2 = get_double(sweep, "delta2", 0.1);
  auto reps = static_cast<std::size_t>(get_int(sweep, "reps", 10000));
  auto factors = get_doubles(sweep, "m_factors", std::vector<double>{1.0});

  learn::SampleBound majority_bound = learn::bound_majority(eta, delta1);
  learn::SampleBound minwt_bound = learn::bound_minwt(zeta, k, delta2);

  std::vector<std::string> rows;
  for (double factor : factors) {
    auto m = static_cast<std::size_t>(std::ceil(factor * static_cast<double>(majority_bound.value)));
    m = std::max<std::size_t>(1, m);
    Rng rng(derive_seed(ctx.base_seed, 21, static_cast<std::uint64_t>(factor * 1e6)));
    std::size_t failures = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      std::size_t correct = 0;
      for (std::size_t i = 0; i < m; ++i) correct += rng.next_double() < eta ? 0 : 1;
      if (2 * correct <= m) ++failures;  // tie counts against the vote
    }
    rows.push_back("majority," + std::to_string(m) + ',' + std::to_string(reps) + ',' +
                   std::to_string(failures) + ',' +
                   fmt(static_cast<double>(failures) / static_cast<double>(reps)) + ',' + fmt(delta1));
  }
  for (double factor : factors) {
    auto m = static_cast<std::size_t>(std::ceil(factor * static_cast<double>(minwt_bound.value)));
    m = std::max<std::size_t>(1, m);
    Rng rng(derive_seed(ctx.base_seed, 22, static_cast<std::uint64_t>(factor * 1e6)));
    std::size_t failures = 0;
    std::vector<std::size_t> bins(static_cast<std::size_t>(zeta));
    for (std::size_t rep = 0; rep < reps; ++rep) {
      std::fill(bins.begin(), bins.end(), 0);
      for (std::size_t i = 0; i < m; ++i) ++bins[rng.next_below(static_cast<std::uint64_t>(zeta))];
      bool ok = std::all_of(bins.begin(), bins.end(),
                            [&](std::size_t b) { return b >= static_cast<std::size_t>(k); });
      if (!ok) ++failures;
    }
    rows.push_back("minwt," + std::to_string(m) + ',' + std::to_string(reps) + ',' +
                   std::to_string(failures) + ',' +
                   fmt(static_cast<double>(failures) / static_cast<double>(reps)) + ',' + fmt(delta2));
  }

  write_csv(ctx, "majority_mc.csv", "check,m,reps,failures,rate,delta", rows,
            {"eta=" + fmt(eta) + " delta1=" + fmt(delta1) + " zeta=" + std::to_string(zeta) +
             " k=" + std::to_string(k) + " delta2=" + fmt(delta2)});
}

}  // namespace lab::harness
