#pragma once

// Monte-Carlo study of the selection procedures: truth functions, seeded
// data generation, the Hellinger oracle and the benchmark ratio C*.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "penlog/core_model.hpp"
#include "penlog/penalty.hpp"
#include "penlog/regressogram.hpp"
#include "penlog/selection.hpp"

namespace penlog {

enum class TruthId { mod1, mod2, mod3, mod4 };

/// Accepts "Mod1".."Mod4" (case-insensitive). Throws UnknownTruth.
TruthId parse_truth(std::string_view name);
std::string truth_name(TruthId id);

double truth_eval(TruthId id, double x);
double truth_eval(std::string_view name, double x);

/// The truth with its bound c1 and probability floor rho filled in.
TrueFunction make_truth(TruthId id);

struct Scenario {
  TrueFunction truth = make_truth(TruthId::mod1);
  std::size_t n = 100;
  std::size_t replications = 200;
  std::uint64_t seed = 0;
  std::vector<PenaltySpec> penalties;
  MaxDimRule collection = MaxDimRule::n_over_log_n();
  KappaGrid grid = KappaGrid::automatic();
  std::size_t threads = 0;  // 0: PENLOG_THREADS, else hardware concurrency

  void validate() const;
};

/// Independent stream for replication `index`: n sorted uniform design
/// points, then Y_i ~ Bernoulli(pi_f0(x_i)).
BinarySample generate(const TrueFunction& truth, std::size_t n, std::uint64_t seed,
                      std::uint64_t replication_index);
BinarySample generate(const Scenario& scenario, std::uint64_t replication_index);

/// Everything a selection rule may look at for one replication.
struct ReplicationView {
  const BinarySample& sample;
  const std::vector<RegressogramFit>& fits;
  const std::vector<ModelScore>& scores;
  const std::vector<double>& truth_probs;
  const std::vector<double>& hellinger;  // h^2(pi_f0, pi_fit) per model
};

/// A named rule choosing one model (index into `fits`) per replication.
struct Contender {
  std::string label;
  std::function<std::size_t(const ReplicationView&)> choose;

  static Contender from_penalty(const PenaltySpec& pen, const KappaGrid& grid);
};

struct BenchmarkEntry {
  std::string truth;
  std::string penalty;
  std::size_t n = 0;
  std::size_t replications = 0;
  double c_star = 0.0;
  double c_star_se = 0.0;  // delta method for the ratio of means
  double numerator_mean = 0.0;
  double numerator_se = 0.0;
  double denominator_mean = 0.0;
  double denominator_se = 0.0;
  std::map<std::size_t, std::size_t> selected_dim_histogram;
  std::map<std::size_t, std::size_t> oracle_dim_histogram;
};

struct BenchmarkReport {
  std::vector<BenchmarkEntry> entries;

  const BenchmarkEntry& find(std::string_view penalty, std::size_t n) const;
};

/// Worker count from PENLOG_THREADS, else hardware concurrency.
std::size_t default_threads();

BenchmarkReport run_benchmark(const Scenario& scenario);
BenchmarkReport run_benchmark(const Scenario& scenario, const std::vector<Contender>& contenders);

/// run_benchmark for each sample size in turn, entries concatenated.
BenchmarkReport run_study(Scenario scenario, const std::vector<std::size_t>& sizes);

}  // namespace penlog
