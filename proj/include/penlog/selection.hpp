#pragma once

// Penalised model choice and slope-heuristic calibration of the penalty
// constant by the dimension-jump method.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "penlog/penalty.hpp"

namespace penlog {

/// What selection needs to know about one fitted model.
struct ModelScore {
  std::size_t id = 0;
  std::size_t dimension = 0;
  double contrast = 0.0;  // gamma_n of the fitted estimator
};

struct CriterionEntry {
  std::size_t model_id = 0;
  std::size_t dimension = 0;
  double contrast = 0.0;
  double penalty = 0.0;
  double criterion = 0.0;
};

struct CriterionPath {
  std::vector<CriterionEntry> entries;
  std::size_t chosen = 0;  // index into entries

  const CriterionEntry& selected() const { return entries.at(chosen); }
};

/// argmin of contrast + pen. Ties (relative 1e-12) go to the smallest
/// dimension, then the smallest model id. Throws EmptyCollection.
CriterionPath select(std::span<const ModelScore> fits, const PenaltySpec& pen, std::size_t n);

/// Same with an arbitrary penalty of the dimension (e.g. identically zero).
CriterionPath select(std::span<const ModelScore> fits,
                     const std::function<double(std::size_t)>& penalty);

/// Trial constants for the dimension-jump scan.
class KappaGrid {
 public:
  /// `points` geometric values from `lower` to an upper end found by
  /// doubling from 1 until the smallest dimension is selected.
  static KappaGrid automatic(std::size_t points = 200, double lower = 1e-3);
  static KappaGrid geometric(std::size_t points, double lower, double upper);
  /// Explicit, strictly increasing values.
  static KappaGrid values(std::vector<double> kappas);

  std::vector<double> resolve(std::span<const ModelScore> fits, const PenaltySpec& shape,
                              std::size_t n) const;

 private:
  KappaGrid() = default;
  std::vector<double> explicit_;
  std::size_t points_ = 200;
  double lower_ = 1e-3;
  double upper_ = 0.0;  // 0 = automatic
};

struct CalibrationResult {
  std::vector<double> kappa_grid;
  std::vector<std::size_t> selected_dims;
  double kappa_min = 0.0;
  double kappa_hat = 0.0;  // 2 * kappa_min
  std::size_t jump_size = 0;
  std::size_t jump_index = 0;  // kappa_grid[jump_index] == kappa_min
};

/// Locates the largest drop in an already computed (kappa, dimension)
/// path. Throws NoJump.
CalibrationResult locate_jump(std::vector<double> kappas, std::vector<std::size_t> dims);

/// Selected dimension over the grid with pen = kappa * shape; kappa_min is
/// the grid point right after the largest drop (ties: largest kappa).
/// Throws NoJump when the selected dimension never changes.
CalibrationResult dimension_jump(std::span<const ModelScore> fits, const PenaltySpec& shape,
                                 const KappaGrid& grid, std::size_t n);

/// Best model after calibrating `pen` (when it has an open constant).
struct CalibratedSelection {
  PenaltySpec penalty;  // with the final constant filled in
  CriterionPath path;
  std::optional<CalibrationResult> calibration;
};

CalibratedSelection select_calibrated(std::span<const ModelScore> fits, const PenaltySpec& pen,
                                      std::size_t n, const KappaGrid& grid = KappaGrid::automatic());

}  // namespace penlog
