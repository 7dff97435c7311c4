#include "penlog/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "penlog/error.hpp"

namespace penlog {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform on [0,1) from the top 53 bits.
double uniform01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
  }
};

// One replication: the oracle term and each contender's pick.
struct ReplicationOutcome {
  double oracle = 0.0;
  std::size_t oracle_dim = 0;
  std::vector<double> selected;
  std::vector<std::size_t> selected_dim;
};

ReplicationOutcome run_replication(const Scenario& scenario, const std::vector<Contender>& contenders,
                                   std::uint64_t index) {
  const BinarySample sample = generate(scenario, index);
  const auto truth_probs = scenario.truth.probs_at(sample);
  const auto models = regular_collection(sample.n(), scenario.collection);

  std::vector<RegressogramFit> fits;
  std::vector<ModelScore> scores;
  std::vector<double> hellinger;
  fits.reserve(models.size());
  for (std::size_t k = 0; k < models.size(); ++k) {
    fits.push_back(fit_regressogram(sample, models[k]));
    scores.push_back({k, fits.back().dimension(), fits.back().contrast});
    hellinger.push_back(hellinger_sq(truth_probs, fits.back().probs_at_design()));
  }

  ReplicationOutcome out;
  const auto best = std::min_element(hellinger.begin(), hellinger.end());
  out.oracle = *best;
  out.oracle_dim = fits[static_cast<std::size_t>(best - hellinger.begin())].dimension();

  const ReplicationView view{sample, fits, scores, truth_probs, hellinger};
  for (const auto& c : contenders) {
    const std::size_t pick = c.choose(view);
    if (pick >= fits.size()) throw UsageError("contender " + c.label + " chose a model outside the collection");
    out.selected.push_back(hellinger[pick]);
    out.selected_dim.push_back(fits[pick].dimension());
  }
  return out;
}

double delta_method_se(const Moments& num, const Moments& den, double cross, std::size_t reps) {
  if (reps < 2) return 0.0;
  const double r = static_cast<double>(reps);
  const double mn = num.sum / r;
  const double md = den.sum / r;
  if (md <= 0.0) return 0.0;
  const double vn = std::max(0.0, (num.sum_sq - r * mn * mn) / (r - 1.0));
  const double vd = std::max(0.0, (den.sum_sq - r * md * md) / (r - 1.0));
  const double cnd = (cross - r * mn * md) / (r - 1.0);
  const double var = (vn / (md * md) - 2.0 * mn * cnd / (md * md * md) + mn * mn * vd / (md * md * md * md)) / r;
  return std::sqrt(std::max(0.0, var));
}

double mean_se(const Moments& m, std::size_t reps) {
  if (reps < 2) return 0.0;
  const double r = static_cast<double>(reps);
  const double mean = m.sum / r;
  return std::sqrt(std::max(0.0, (m.sum_sq - r * mean * mean) / (r - 1.0)) / r);
}

}  // namespace

TruthId parse_truth(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "mod1") return TruthId::mod1;
  if (lower == "mod2") return TruthId::mod2;
  if (lower == "mod3") return TruthId::mod3;
  if (lower == "mod4") return TruthId::mod4;
  throw UnknownTruth(std::string(name));
}

std::string truth_name(TruthId id) {
  switch (id) {
    case TruthId::mod1: return "Mod1";
    case TruthId::mod2: return "Mod2";
    case TruthId::mod3: return "Mod3";
    case TruthId::mod4: return "Mod4";
  }
  return "?";
}

double truth_eval(TruthId id, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DataError("truth evaluated outside [0,1]");
  switch (id) {
    case TruthId::mod1:
      if (x < 1.0 / 3.0) return 0.5;
      if (x < 0.5) return 1.0;
      if (x < 2.0 / 3.0) return 2.0;
      return 0.25;
    case TruthId::mod2:
      // [0,1/4] is closed, so x = 1/4 takes the first value.
      if (x <= 0.25) return 0.75;
      if (x < 0.5) return 0.5;
      if (x < 0.75) return 0.2;
      return 0.3;
    case TruthId::mod3: return std::sin(std::numbers::pi * x);
    case TruthId::mod4: return std::sqrt(x);
  }
  return 0.0;
}

double truth_eval(std::string_view name, double x) { return truth_eval(parse_truth(name), x); }

TrueFunction make_truth(TruthId id) {
  double lo = 0.0;
  double hi = 0.0;
  switch (id) {
    case TruthId::mod1: lo = 0.25, hi = 2.0; break;
    case TruthId::mod2: lo = 0.2, hi = 0.75; break;
    case TruthId::mod3: lo = 0.0, hi = 1.0; break;
    case TruthId::mod4: lo = 0.0, hi = 1.0; break;
  }
  TrueFunction t;
  t.name = truth_name(id);
  t.evaluator = [id](double x) { return truth_eval(id, x); };
  t.bound_c1 = std::max(std::abs(lo), std::abs(hi));
  t.rho = std::min(sigmoid(lo), 1.0 - sigmoid(hi));
  return t;
}

void Scenario::validate() const {
  if (replications < 1) throw UsageError("replications must be >= 1");
  if (n < 10) throw UsageError("simulation needs n >= 10");
  if (!truth.evaluator) throw UsageError("scenario has no truth function");
}

BinarySample generate(const TrueFunction& truth, std::size_t n, std::uint64_t seed,
                      std::uint64_t replication_index) {
  const std::uint64_t stream = splitmix64(seed ^ splitmix64(replication_index + 0x632BE59BD9B4E019ULL));
  std::mt19937_64 eng(stream);
  std::vector<double> xs(n);
  for (auto& x : xs) x = uniform01(eng);
  std::sort(xs.begin(), xs.end());
  std::vector<std::uint8_t> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = uniform01(eng) < sigmoid(truth(xs[i])) ? 1 : 0;
  return BinarySample(std::move(xs), std::move(ys));
}

BinarySample generate(const Scenario& scenario, std::uint64_t replication_index) {
  return generate(scenario.truth, scenario.n, scenario.seed, replication_index);
}

Contender Contender::from_penalty(const PenaltySpec& pen, const KappaGrid& grid) {
  return Contender{pen.to_string(), [pen, grid](const ReplicationView& view) -> std::size_t {
                     const std::size_t n = view.sample.n();
                     try {
                       return select_calibrated(view.scores, pen, n, grid).path.selected().model_id;
                     } catch (const NoJump&) {
                       // Every constant on the grid picks the same model.
                       const auto kappas = grid.resolve(view.scores, pen, n);
                       return select(view.scores, pen.with_scale(kappas.front()), n).selected().model_id;
                     }
                   }};
}

const BenchmarkEntry& BenchmarkReport::find(std::string_view penalty, std::size_t n) const {
  for (const auto& e : entries)
    if (e.penalty == penalty && e.n == n) return e;
  throw UsageError("no benchmark entry for " + std::string(penalty) + " at n = " + std::to_string(n));
}

std::size_t default_threads() {
  if (const char* env = std::getenv("PENLOG_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BenchmarkReport run_benchmark(const Scenario& scenario) {
  std::vector<Contender> contenders;
  for (const auto& pen : scenario.penalties) contenders.push_back(Contender::from_penalty(pen, scenario.grid));
  return run_benchmark(scenario, contenders);
}

BenchmarkReport run_benchmark(const Scenario& scenario, const std::vector<Contender>& contenders) {
  scenario.validate();
  if (contenders.empty()) throw UsageError("benchmark needs at least one penalty");
  const std::size_t reps = scenario.replications;
  std::vector<ReplicationOutcome> outcomes(reps);

  std::size_t workers = scenario.threads ? scenario.threads : default_threads();
  workers = std::clamp<std::size_t>(workers, 1, reps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        outcomes[r] = run_replication(scenario, contenders, r);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = reps;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Aggregate in replication order so the report is schedule-independent.
  BenchmarkReport report;
  Moments den;
  std::map<std::size_t, std::size_t> oracle_hist;
  for (const auto& o : outcomes) {
    den.add(o.oracle);
    ++oracle_hist[o.oracle_dim];
  }
  const double r = static_cast<double>(reps);
  for (std::size_t c = 0; c < contenders.size(); ++c) {
    Moments num;
    double cross = 0.0;
    BenchmarkEntry e;
    for (const auto& o : outcomes) {
      num.add(o.selected[c]);
      cross += o.selected[c] * o.oracle;
      ++e.selected_dim_histogram[o.selected_dim[c]];
    }
    e.truth = scenario.truth.name;
    e.penalty = contenders[c].label;
    e.n = scenario.n;
    e.replications = reps;
    e.numerator_mean = num.sum / r;
    e.denominator_mean = den.sum / r;
    e.numerator_se = mean_se(num, reps);
    e.denominator_se = mean_se(den, reps);
    e.c_star = e.denominator_mean > 0.0 ? e.numerator_mean / e.denominator_mean : 1.0;
    e.c_star_se = delta_method_se(num, den, cross, reps);
    e.oracle_dim_histogram = oracle_hist;
    report.entries.push_back(std::move(e));
  }
  return report;
}

BenchmarkReport run_study(Scenario scenario, const std::vector<std::size_t>& sizes) {
  BenchmarkReport out;
  for (std::size_t n : sizes) {
    scenario.n = n;
    auto part = run_benchmark(scenario);
    out.entries.insert(out.entries.end(), part.entries.begin(), part.entries.end());
  }
  return out;
}

}  // namespace penlog
