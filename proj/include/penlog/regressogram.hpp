#pragma once

// Piecewise-constant maximum-likelihood estimators (regressograms), the
// projection of the true regression function onto a partition, and exact
// search over irregular partitions.

#include <cstddef>
#include <optional>
#include <vector>

#include "penlog/core_model.hpp"

namespace penlog {

/// Ordered partition of [0,1] into D intervals [e_k, e_{k+1}); the last
/// interval is closed at 1.
class PartitionModel {
 public:
  enum class Kind { regular, irregular };

  /// `edges` must start at 0, end at 1 and be strictly increasing.
  PartitionModel(std::vector<double> edges, Kind kind);

  /// Cells [(k-1)/D, k/D) for k = 1..D.
  static PartitionModel regular(std::size_t dim);

  std::size_t dimension() const noexcept { return edges_.size() - 1; }
  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& edges() const noexcept { return edges_; }

  std::size_t cell_of(double x) const;

  /// Offsets b_0 = 0 <= b_1 <= ... <= b_D = n such that cell k holds the
  /// sorted observations [b_k, b_{k+1}).
  std::vector<std::size_t> bounds(const BinarySample& sample) const;

  /// Every cell holds at least `min_cell` design points.
  bool satisfies_min_cell(const BinarySample& sample, std::size_t min_cell) const;

  /// Every cell of `coarse` is a union of cells of this partition.
  bool refines(const PartitionModel& coarse) const;

 private:
  std::vector<double> edges_;
  Kind kind_;
};

struct RegressogramFit {
  PartitionModel model;
  std::vector<std::size_t> cell_bounds;  // see PartitionModel::bounds
  std::vector<double> cell_probs;
  std::vector<double> cell_logits;
  double contrast = 0.0;
  std::vector<std::size_t> degenerate_cells;  // probability exactly 0 or 1
  std::vector<std::size_t> empty_cells;       // no design point

  std::size_t dimension() const noexcept { return model.dimension(); }
  std::size_t cell_size(std::size_t k) const { return cell_bounds[k + 1] - cell_bounds[k]; }

  /// Per-observation probabilities / logits at the design points.
  std::vector<double> probs_at_design() const;
  FittedLogit fitted() const;
};

/// Cell means of Y with logits; empty cells get probability 1/2 and are flagged.
RegressogramFit fit_regressogram(const BinarySample& sample, const PartitionModel& model);

/// Cell means of pi_f0: the ||.||_n projection of pi_f0 onto the partition.
/// `contrast` holds gamma_n of the projected logits on the sample's labels,
/// +inf when a degenerate projected cell meets a conflicting label.
RegressogramFit project_truth(const TrueFunction& truth, const BinarySample& sample,
                              const PartitionModel& model);

/// Upper bound on D for a collection of regular partitions.
class MaxDimRule {
 public:
  /// D <= n / log n (at least 1, at most n).
  static MaxDimRule n_over_log_n() { return MaxDimRule(std::nullopt); }
  static MaxDimRule fixed(std::size_t cap) { return MaxDimRule(cap); }

  std::size_t max_dim(std::size_t n) const;

 private:
  explicit MaxDimRule(std::optional<std::size_t> cap) : cap_(cap) {}
  std::optional<std::size_t> cap_;
};

std::vector<PartitionModel> regular_collection(std::size_t n,
                                               MaxDimRule rule = MaxDimRule::n_over_log_n());

/// |J| * H(successes / |J|) / n: the contribution of one cell to gamma_n.
double segment_cost(std::size_t count, std::size_t successes, std::size_t n) noexcept;

/// max(1, floor(gamma * log(n)^2)).
std::size_t default_min_cell(std::size_t n, double gamma = 0.0);

struct IrregularFit {
  PartitionModel model;
  // Number of observations before each interior cut, strictly increasing.
  std::vector<std::size_t> breakpoints;
  double contrast = 0.0;
};

/// Minimum-contrast partition with exactly `dim` cells, cuts between
/// distinct consecutive design points, each cell >= min_cell points.
/// Among optimal partitions the lexicographically smallest breakpoint
/// vector wins. Throws InfeasibleDimension.
IrregularFit best_irregular_partition(const BinarySample& sample, std::size_t dim,
                                      std::size_t min_cell = 1);

/// best_irregular_partition for every feasible D = 1..max_dim from one table.
std::vector<IrregularFit> best_irregular_path(const BinarySample& sample, std::size_t max_dim,
                                              std::size_t min_cell = 1);

/// Relative tolerance under which two contrasts count as tied.
inline constexpr double kContrastTieTolerance = 1e-12;

}  // namespace penlog
