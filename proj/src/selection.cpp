#include "penlog/selection.hpp"

#include <algorithm>
#include <cmath>

#include "penlog/error.hpp"

namespace penlog {

namespace {

// Index of the tie-broken argmin; `crit` parallel to `fits`.
std::size_t argmin(std::span<const ModelScore> fits, std::span<const double> crit) {
  const double best = *std::min_element(crit.begin(), crit.end());
  const double slack = 1e-12 * std::max(1.0, std::abs(best));
  std::size_t chosen = fits.size();
  for (std::size_t k = 0; k < fits.size(); ++k) {
    if (!(crit[k] <= best + slack)) continue;
    if (chosen == fits.size() || fits[k].dimension < fits[chosen].dimension ||
        (fits[k].dimension == fits[chosen].dimension && fits[k].id < fits[chosen].id))
      chosen = k;
  }
  return chosen;
}

std::size_t selected_dimension(std::span<const ModelScore> fits, std::span<const double> shape,
                               double kappa, std::vector<double>& scratch) {
  scratch.resize(fits.size());
  for (std::size_t k = 0; k < fits.size(); ++k) scratch[k] = fits[k].contrast + kappa * shape[k];
  return fits[argmin(fits, scratch)].dimension;
}

std::vector<double> shape_values(std::span<const ModelScore> fits, const PenaltySpec& shape,
                                 std::size_t n) {
  std::vector<double> out(fits.size());
  for (std::size_t k = 0; k < fits.size(); ++k) out[k] = evaluate_shape(shape, fits[k].dimension, n);
  return out;
}

}  // namespace

CriterionPath select(std::span<const ModelScore> fits,
                     const std::function<double(std::size_t)>& penalty) {
  if (fits.empty()) throw EmptyCollection();
  CriterionPath path;
  path.entries.reserve(fits.size());
  std::vector<double> crit(fits.size());
  for (std::size_t k = 0; k < fits.size(); ++k) {
    const double pen = penalty(fits[k].dimension);
    crit[k] = fits[k].contrast + pen;
    path.entries.push_back({fits[k].id, fits[k].dimension, fits[k].contrast, pen, crit[k]});
  }
  path.chosen = argmin(fits, crit);
  return path;
}

CriterionPath select(std::span<const ModelScore> fits, const PenaltySpec& pen, std::size_t n) {
  return select(fits, [&](std::size_t dim) { return evaluate(pen, dim, n); });
}

KappaGrid KappaGrid::automatic(std::size_t points, double lower) {
  if (points < 2 || !(lower > 0.0)) throw UsageError("kappa grid needs >= 2 points and lower > 0");
  KappaGrid g;
  g.points_ = points;
  g.lower_ = lower;
  return g;
}

KappaGrid KappaGrid::geometric(std::size_t points, double lower, double upper) {
  KappaGrid g = automatic(points, lower);
  if (!(upper > lower)) throw UsageError("kappa grid upper end must exceed the lower end");
  g.upper_ = upper;
  return g;
}

KappaGrid KappaGrid::values(std::vector<double> kappas) {
  if (kappas.size() < 2) throw UsageError("kappa grid needs >= 2 points");
  for (std::size_t k = 0; k < kappas.size(); ++k)
    if (!(kappas[k] >= 0.0) || (k > 0 && !(kappas[k] > kappas[k - 1])))
      throw UsageError("kappa grid must be non-negative and strictly increasing");
  KappaGrid g;
  g.explicit_ = std::move(kappas);
  return g;
}

std::vector<double> KappaGrid::resolve(std::span<const ModelScore> fits, const PenaltySpec& shape,
                                       std::size_t n) const {
  if (!explicit_.empty()) return explicit_;
  double upper = upper_;
  if (upper <= 0.0) {
    const auto pen = shape_values(fits, shape, n);
    std::size_t smallest = fits[0].dimension;
    for (const auto& f : fits) smallest = std::min(smallest, f.dimension);
    std::vector<double> scratch;
    upper = 1.0;
    for (int doubling = 0; doubling < 1000; ++doubling, upper *= 2.0)
      if (selected_dimension(fits, pen, upper, scratch) == smallest) break;
    upper = std::max(upper, 2.0 * lower_);
  }
  std::vector<double> out(points_);
  const double log_ratio = std::log(upper / lower_);
  for (std::size_t j = 0; j < points_; ++j)
    out[j] = lower_ * std::exp(log_ratio * static_cast<double>(j) / static_cast<double>(points_ - 1));
  out.back() = upper;
  return out;
}

CalibrationResult locate_jump(std::vector<double> kappas, std::vector<std::size_t> dims) {
  if (kappas.size() != dims.size()) throw LengthMismatch(kappas.size(), dims.size());
  CalibrationResult res;
  res.kappa_grid = std::move(kappas);
  res.selected_dims = std::move(dims);
  bool found = false;
  for (std::size_t j = 0; j + 1 < res.selected_dims.size(); ++j) {
    if (res.selected_dims[j + 1] >= res.selected_dims[j]) continue;
    const std::size_t drop = res.selected_dims[j] - res.selected_dims[j + 1];
    if (!found || drop >= res.jump_size) {
      res.jump_size = drop;
      res.jump_index = j + 1;
      found = true;
    }
  }
  if (!found) throw NoJump();
  res.kappa_min = res.kappa_grid[res.jump_index];
  res.kappa_hat = 2.0 * res.kappa_min;
  return res;
}

CalibrationResult dimension_jump(std::span<const ModelScore> fits, const PenaltySpec& shape,
                                 const KappaGrid& grid, std::size_t n) {
  if (fits.empty()) throw EmptyCollection();
  auto kappas = grid.resolve(fits, shape, n);
  const auto pen = shape_values(fits, shape, n);
  std::vector<double> scratch;
  std::vector<std::size_t> dims;
  dims.reserve(kappas.size());
  for (double kappa : kappas) dims.push_back(selected_dimension(fits, pen, kappa, scratch));
  return locate_jump(std::move(kappas), std::move(dims));
}

CalibratedSelection select_calibrated(std::span<const ModelScore> fits, const PenaltySpec& pen,
                                      std::size_t n, const KappaGrid& grid) {
  CalibratedSelection out{pen, {}, std::nullopt};
  if (pen.needs_calibration()) {
    out.calibration = dimension_jump(fits, pen, grid, n);
    out.penalty = pen.with_scale(out.calibration->kappa_hat);
  }
  out.path = select(fits, out.penalty, n);
  return out;
}

}  // namespace penlog
