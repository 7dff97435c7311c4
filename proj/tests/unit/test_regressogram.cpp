#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "penlog/error.hpp"
#include "penlog/regressogram.hpp"
#include "penlog/simulation.hpp"
#include "test_helpers.hpp"

using namespace penlog;
using namespace penlog::testing;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

PartitionModel two_cells(double edge) {
  return PartitionModel({0.0, edge, 1.0}, PartitionModel::Kind::irregular);
}
}  // namespace

TEST_CASE("cell means and logits") {
  // Cells [0,0.4) with 4 points, [0.4,0.7) with 4, [0.7,1] with 3.
  const BinarySample s({0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.55, 0.6, 0.7, 0.8, 0.9},
                       {1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0});
  const PartitionModel m({0.0, 0.4, 0.7, 1.0}, PartitionModel::Kind::irregular);
  const auto fit = fit_regressogram(s, m);
  REQUIRE(fit.dimension() == 3);
  CHECK(fit.cell_size(0) == 4);
  CHECK(fit.cell_size(1) == 4);
  CHECK(fit.cell_size(2) == 3);
  CHECK(fit.cell_probs[0] == 0.5);
  CHECK(fit.cell_logits[0] == 0.0);
  CHECK(fit.cell_probs[1] == 0.25);
  CHECK(fit.cell_logits[1] == doctest::Approx(std::log(1.0 / 3.0)));
  CHECK(fit.cell_probs[2] == 0.0);
  CHECK(fit.cell_logits[2] == -inf);
  REQUIRE(fit.degenerate_cells.size() == 1);
  CHECK(fit.degenerate_cells[0] == 2);
  CHECK(fit.empty_cells.empty());
  // Entropy form agrees with the observation-wise contrast.
  CHECK(fit.contrast == doctest::Approx(contrast(s, fit.fitted())).epsilon(1e-14));
  CHECK(fit.contrast == doctest::Approx((4 * std::log(2.0) + 4 * bernoulli_entropy(0.25)) / 11.0));
}

TEST_CASE("empty cells get probability one half") {
  const BinarySample s({0.01, 0.02, 0.2}, {1, 0, 1});
  const auto fit = fit_regressogram(s, PartitionModel::regular(4));
  CHECK(fit.empty_cells == std::vector<std::size_t>{1, 2, 3});
  CHECK(fit.cell_probs[3] == 0.5);
  CHECK(fit.cell_logits[3] == 0.0);
  CHECK(std::isfinite(fit.contrast));
}

TEST_CASE("partition validation and cell lookup") {
  CHECK_THROWS_AS(PartitionModel({0.0, 0.5}, PartitionModel::Kind::regular), DataError);
  CHECK_THROWS_AS(PartitionModel({0.0, 0.6, 0.6, 1.0}, PartitionModel::Kind::regular), DataError);
  const auto m = PartitionModel::regular(4);
  CHECK(m.cell_of(0.0) == 0);
  CHECK(m.cell_of(0.25) == 1);
  CHECK(m.cell_of(0.999) == 3);
  CHECK(m.cell_of(1.0) == 3);
  CHECK(PartitionModel::regular(8).refines(PartitionModel::regular(4)));
  CHECK_FALSE(PartitionModel::regular(3).refines(PartitionModel::regular(2)));
}

TEST_CASE("projection of the truth") {
  const BinarySample s({0.1, 0.2, 0.6, 0.7}, {0, 1, 1, 1});
  TrueFunction constant{"c", [](double) { return std::log(0.3 / 0.7); }, {}, {}};
  const auto pc = project_truth(constant, s, two_cells(0.5));
  CHECK(pc.cell_probs[0] == doctest::Approx(0.3));
  CHECK(pc.cell_probs[1] == doctest::Approx(0.3));

  TrueFunction two_point{"tp", [](double x) { return x < 0.15 ? logit(0.2) : logit(0.4); }, {}, {}};
  const auto pt = project_truth(two_point, s, two_cells(0.5));
  CHECK(pt.cell_probs[0] == doctest::Approx(0.3));

  const BinarySample inside({0.05, 0.1, 0.2, 0.3}, {1, 0, 1, 1});
  const auto mod1 = make_truth(TruthId::mod1);
  const auto pm = project_truth(mod1, inside, PartitionModel({0.0, 1.0 / 3.0, 1.0}, PartitionModel::Kind::irregular));
  CHECK(pm.cell_probs[0] == doctest::Approx(0.6224593312018546).epsilon(1e-14));
  CHECK(pm.empty_cells == std::vector<std::size_t>{1});
}

TEST_CASE("projection minimises the empirical distance to pi_f0") {
  std::mt19937_64 rng(3);
  const auto truth = make_truth(TruthId::mod3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = random_sample(rng, 40);
    const auto m = PartitionModel::regular(1 + trial % 6);
    const auto proj = project_truth(truth, s, m);
    const auto p0 = truth.probs_at(s);
    auto dist = [&](const std::vector<double>& cellp) {
      double d = 0.0;
      for (std::size_t k = 0; k < cellp.size(); ++k)
        for (std::size_t i = proj.cell_bounds[k]; i < proj.cell_bounds[k + 1]; ++i)
          d += (cellp[k] - p0[i]) * (cellp[k] - p0[i]);
      return d;
    };
    const double base = dist(proj.cell_probs);
    for (std::size_t k = 0; k < proj.dimension(); ++k) {
      for (double delta : {-1e-3, 1e-3, -0.05, 0.05}) {
        auto moved = proj.cell_probs;
        moved[k] += delta;
        CHECK(dist(moved) >= base);
      }
    }
  }
}

TEST_CASE("mle optimality against per-cell logit perturbations") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_sample(rng, 5 + trial);
    const auto fit = fit_regressogram(s, PartitionModel::regular(1 + trial % 4));
    for (std::size_t k = 0; k < fit.dimension(); ++k) {
      for (int g = -600; g <= 600; g += 7) {
        auto f = fit.fitted().values;
        for (std::size_t i = fit.cell_bounds[k]; i < fit.cell_bounds[k + 1]; ++i) f[i] = 0.01 * g;
        CHECK(contrast(s, f) >= fit.contrast - 1e-14);
      }
    }
  }
}

TEST_CASE("pythagoras decomposition of the KL divergence") {
  std::mt19937_64 rng(23);
  const auto truth = make_truth(TruthId::mod1);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 60; ++trial) {
    const auto s = random_sample(rng, 60);
    const auto m = PartitionModel::regular(1 + trial % 5);
    const auto fit = fit_regressogram(s, m);
    if (!fit.degenerate_cells.empty()) continue;
    const auto proj = project_truth(truth, s, m);
    const auto p0 = truth.probs_at(s);
    const auto pm = proj.probs_at_design();
    const auto ph = fit.probs_at_design();
    CHECK(kl_divergence(p0, ph) == doctest::Approx(kl_divergence(p0, pm) + kl_divergence(pm, ph)).epsilon(1e-10).scale(1.0));
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("refinement lowers the contrast") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_sample(rng, 50);
    const std::size_t d = 1 + trial % 6;
    const auto coarse = fit_regressogram(s, PartitionModel::regular(d));
    const auto fine = fit_regressogram(s, PartitionModel::regular(2 * d));
    CHECK(fine.contrast <= coarse.contrast + 1e-15);
  }
}

TEST_CASE("regular collections") {
  CHECK(regular_collection(10).size() == 4);
  CHECK(regular_collection(2).size() == 2);
  const auto c = regular_collection(100);
  CHECK(c.size() == 21);
  CHECK(c.front().dimension() == 1);
  CHECK(c.front().edges() == std::vector<double>{0.0, 1.0});
  CHECK(c.back().kind() == PartitionModel::Kind::regular);
  CHECK(regular_collection(50, MaxDimRule::fixed(3)).size() == 3);
  CHECK_THROWS_AS(regular_collection(1), DataError);
}

TEST_CASE("default minimum cell size") {
  CHECK(default_min_cell(100) == 1);
  CHECK(default_min_cell(100, 0.1) == 2);  // 0.1 * log(100)^2 = 2.12
  CHECK(default_min_cell(2, 5.0) == 2);
}

TEST_CASE("irregular search examples") {
  const auto s = labelled({0, 0, 1, 1});
  const auto two = best_irregular_partition(s, 2);
  CHECK(two.breakpoints == std::vector<std::size_t>{2});
  CHECK(two.contrast == 0.0);
  const auto one = best_irregular_partition(s, 1);
  CHECK(one.breakpoints.empty());
  CHECK(one.contrast == doctest::Approx(std::log(2.0)));
  const auto sat = best_irregular_partition(s, 4);
  CHECK(sat.contrast == 0.0);
  CHECK(fit_regressogram(s, sat.model).degenerate_cells.size() == 4);
  CHECK_THROWS_AS(best_irregular_partition(s, 3, 2), InfeasibleDimension);
  CHECK_THROWS_AS(best_irregular_partition(s, 5), InfeasibleDimension);
}

TEST_CASE("irregular partitions respect tied design points") {
  const BinarySample s({0.2, 0.2, 0.2, 0.8}, {0, 1, 0, 1});
  CHECK_THROWS_AS(best_irregular_partition(s, 3), InfeasibleDimension);
  const auto two = best_irregular_partition(s, 2);
  CHECK(two.breakpoints == std::vector<std::size_t>{3});
  const auto fit = fit_regressogram(s, two.model);
  CHECK(fit.cell_size(0) == 3);
  CHECK(fit.contrast == doctest::Approx(two.contrast).epsilon(1e-14));
}

TEST_CASE("dynamic program agrees with enumeration") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const auto s = random_sample(rng, n, trial % 3 == 0 ? 0.2 : 0.5);
    for (std::size_t min_cell : {1u, 2u}) {
      for (std::size_t d = 1; d * min_cell <= n; ++d) {
        const auto oracle = brute_force_partition(s, d, min_cell);
        REQUIRE(oracle.feasible);
        const auto dp = best_irregular_partition(s, d, min_cell);
        CHECK(dp.contrast == doctest::Approx(oracle.contrast).epsilon(1e-12).scale(1.0));
        CHECK(dp.breakpoints == oracle.cuts);
        CHECK(dp.model.satisfies_min_cell(s, min_cell));
      }
    }
  }
}

TEST_CASE("path of best partitions matches single calls") {
  std::mt19937_64 rng(37);
  const auto s = random_sample(rng, 30);
  const auto path = best_irregular_path(s, 8, 2);
  REQUIRE(path.size() == 8);
  for (std::size_t d = 1; d <= 8; ++d) {
    const auto single = best_irregular_partition(s, d, 2);
    CHECK(path[d - 1].breakpoints == single.breakpoints);
    CHECK(path[d - 1].model.dimension() == d);
    if (d > 1) CHECK(path[d - 1].contrast <= path[d - 2].contrast + 1e-15);
  }
}
