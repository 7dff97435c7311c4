#include "penlog/regressogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "penlog/error.hpp"

namespace penlog {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool tied_or_better(double candidate, double best) {
  return candidate <= best + kContrastTieTolerance * std::max(1.0, std::abs(best));
}

// Edge separating x[k-1] from x[k] (requires x[k-1] < x[k]); the left
// point stays strictly below it, the right point lands on or above it.
double cut_edge(double left, double right) {
  const double mid = left + (right - left) / 2.0;
  return mid > left ? mid : right;
}

}  // namespace

PartitionModel::PartitionModel(std::vector<double> edges, Kind kind)
    : edges_(std::move(edges)), kind_(kind) {
  if (edges_.size() < 2) throw DataError("a partition needs at least one cell");
  if (edges_.front() != 0.0 || edges_.back() != 1.0)
    throw DataError("partition edges must start at 0 and end at 1");
  for (std::size_t k = 1; k < edges_.size(); ++k)
    if (!(edges_[k] > edges_[k - 1])) throw DataError("partition edges must be increasing");
}

PartitionModel PartitionModel::regular(std::size_t dim) {
  if (dim == 0) throw DimensionOutOfRange(dim, 0);
  std::vector<double> edges(dim + 1);
  for (std::size_t k = 0; k <= dim; ++k)
    edges[k] = static_cast<double>(k) / static_cast<double>(dim);
  return PartitionModel(std::move(edges), Kind::regular);
}

std::size_t PartitionModel::cell_of(double x) const {
  const auto first = edges_.begin() + 1;
  const auto last = edges_.end() - 1;
  return static_cast<std::size_t>(std::upper_bound(first, last, x) - first);
}

std::vector<std::size_t> PartitionModel::bounds(const BinarySample& sample) const {
  const auto xs = sample.xs();
  std::vector<std::size_t> out(edges_.size());
  out.front() = 0;
  out.back() = sample.n();
  for (std::size_t k = 1; k + 1 < edges_.size(); ++k)
    out[k] = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), edges_[k]) - xs.begin());
  return out;
}

bool PartitionModel::satisfies_min_cell(const BinarySample& sample, std::size_t min_cell) const {
  const auto b = bounds(sample);
  for (std::size_t k = 0; k + 1 < b.size(); ++k)
    if (b[k + 1] - b[k] < min_cell) return false;
  return true;
}

bool PartitionModel::refines(const PartitionModel& coarse) const {
  return std::includes(edges_.begin(), edges_.end(), coarse.edges_.begin(), coarse.edges_.end());
}

std::vector<double> RegressogramFit::probs_at_design() const {
  std::vector<double> out(cell_bounds.back());
  for (std::size_t k = 0; k < cell_probs.size(); ++k)
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(cell_bounds[k]),
              out.begin() + static_cast<std::ptrdiff_t>(cell_bounds[k + 1]), cell_probs[k]);
  return out;
}

FittedLogit RegressogramFit::fitted() const {
  FittedLogit out;
  out.probs = probs_at_design();
  out.values.resize(out.probs.size());
  for (std::size_t k = 0; k < cell_logits.size(); ++k)
    std::fill(out.values.begin() + static_cast<std::ptrdiff_t>(cell_bounds[k]),
              out.values.begin() + static_cast<std::ptrdiff_t>(cell_bounds[k + 1]), cell_logits[k]);
  return out;
}

double segment_cost(std::size_t count, std::size_t successes, std::size_t n) noexcept {
  if (count == 0) return 0.0;
  const double c = static_cast<double>(count);
  return c * bernoulli_entropy(static_cast<double>(successes) / c) / static_cast<double>(n);
}

RegressogramFit fit_regressogram(const BinarySample& sample, const PartitionModel& model) {
  RegressogramFit fit{model, model.bounds(sample), {}, {}, 0.0, {}, {}};
  const std::size_t dim = model.dimension();
  fit.cell_probs.resize(dim);
  fit.cell_logits.resize(dim);
  const auto ys = sample.ys();
  for (std::size_t k = 0; k < dim; ++k) {
    const std::size_t count = fit.cell_size(k);
    if (count == 0) {
      fit.cell_probs[k] = 0.5;
      fit.cell_logits[k] = 0.0;
      fit.empty_cells.push_back(k);
      continue;
    }
    std::size_t successes = 0;
    for (std::size_t i = fit.cell_bounds[k]; i < fit.cell_bounds[k + 1]; ++i) successes += ys[i];
    const double p = static_cast<double>(successes) / static_cast<double>(count);
    fit.cell_probs[k] = p;
    fit.cell_logits[k] = logit(p);
    if (successes == 0 || successes == count) fit.degenerate_cells.push_back(k);
    fit.contrast += segment_cost(count, successes, sample.n());
  }
  return fit;
}

RegressogramFit project_truth(const TrueFunction& truth, const BinarySample& sample,
                              const PartitionModel& model) {
  RegressogramFit fit{model, model.bounds(sample), {}, {}, 0.0, {}, {}};
  const std::size_t dim = model.dimension();
  fit.cell_probs.resize(dim);
  fit.cell_logits.resize(dim);
  const auto p0 = truth.probs_at(sample);
  for (std::size_t k = 0; k < dim; ++k) {
    const std::size_t count = fit.cell_size(k);
    if (count == 0) {
      fit.cell_probs[k] = 0.5;
      fit.cell_logits[k] = 0.0;
      fit.empty_cells.push_back(k);
      continue;
    }
    double sum = 0.0;
    for (std::size_t i = fit.cell_bounds[k]; i < fit.cell_bounds[k + 1]; ++i) sum += p0[i];
    const double p = std::clamp(sum / static_cast<double>(count), 0.0, 1.0);
    fit.cell_probs[k] = p;
    fit.cell_logits[k] = logit(p);
    if (p == 0.0 || p == 1.0) fit.degenerate_cells.push_back(k);
  }
  try {
    fit.contrast = contrast(sample, fit.fitted());
  } catch (const NonFiniteContrast&) {
    fit.contrast = kInf;
  }
  return fit;
}

std::size_t MaxDimRule::max_dim(std::size_t n) const {
  if (n == 0) return 0;
  if (cap_) return std::clamp<std::size_t>(*cap_, 1, n);
  if (n < 2) return 1;
  const double bound = static_cast<double>(n) / std::log(static_cast<double>(n));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(bound)), 1, n);
}

std::vector<PartitionModel> regular_collection(std::size_t n, MaxDimRule rule) {
  if (n < 2) throw DataError("regular collection needs n >= 2");
  const std::size_t top = rule.max_dim(n);
  std::vector<PartitionModel> out;
  out.reserve(top);
  for (std::size_t d = 1; d <= top; ++d) out.push_back(PartitionModel::regular(d));
  return out;
}

std::size_t default_min_cell(std::size_t n, double gamma) {
  if (n < 2 || gamma <= 0.0) return 1;
  const double l = std::log(static_cast<double>(n));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(gamma * l * l)));
}

namespace {

// Suffix dynamic program: tail[k][i] = least contrast of splitting the
// observations [i, n) into k + 1 cells.
class SegmentTable {
 public:
  SegmentTable(const BinarySample& sample, std::size_t max_dim, std::size_t min_cell)
      : sample_(sample), n_(sample.n()), min_cell_(std::max<std::size_t>(min_cell, 1)) {
    prefix_.assign(n_ + 1, 0);
    for (std::size_t i = 0; i < n_; ++i) prefix_[i + 1] = prefix_[i] + sample.ys()[i];
    cuttable_.assign(n_ + 1, false);
    cuttable_[0] = true;
    for (std::size_t k = 1; k < n_; ++k) cuttable_[k] = sample.x(k - 1) < sample.x(k);

    tail_.assign(max_dim, std::vector<double>(n_ + 1, kInf));
    for (std::size_t i = 0; i < n_; ++i)
      if (cuttable_[i] && n_ - i >= min_cell_) tail_[0][i] = cost(i, n_);
    for (std::size_t k = 1; k < max_dim; ++k) {
      for (std::size_t i = 0; i < n_; ++i) {
        if (!cuttable_[i]) continue;
        double best = kInf;
        for (std::size_t j = i + min_cell_; j < n_; ++j) {
          if (!cuttable_[j] || tail_[k - 1][j] == kInf) continue;
          best = std::min(best, cost(i, j) + tail_[k - 1][j]);
        }
        tail_[k][i] = best;
      }
    }
  }

  bool feasible(std::size_t dim) const { return dim >= 1 && dim <= tail_.size() && tail_[dim - 1][0] < kInf; }

  IrregularFit reconstruct(std::size_t dim) const {
    std::vector<std::size_t> cuts;
    std::size_t i = 0;
    for (std::size_t k = dim - 1; k >= 1; --k) {
      const double target = tail_[k][i];
      std::size_t chosen = n_;
      for (std::size_t j = i + min_cell_; j < n_; ++j) {
        if (!cuttable_[j] || tail_[k - 1][j] == kInf) continue;
        if (tied_or_better(cost(i, j) + tail_[k - 1][j], target)) {
          chosen = j;
          break;
        }
      }
      cuts.push_back(chosen);
      i = chosen;
    }

    std::vector<double> edges{0.0};
    for (std::size_t c : cuts) edges.push_back(cut_edge(sample_.x(c - 1), sample_.x(c)));
    edges.push_back(1.0);

    double total = 0.0;
    std::size_t begin = 0;
    for (std::size_t c : cuts) {
      total += cost(begin, c);
      begin = c;
    }
    total += cost(begin, n_);
    return IrregularFit{PartitionModel(std::move(edges), PartitionModel::Kind::irregular),
                        std::move(cuts), total};
  }

 private:
  double cost(std::size_t i, std::size_t j) const {
    return segment_cost(j - i, prefix_[j] - prefix_[i], n_);
  }

  const BinarySample& sample_;
  std::size_t n_;
  std::size_t min_cell_;
  std::vector<std::size_t> prefix_;
  std::vector<bool> cuttable_;
  std::vector<std::vector<double>> tail_;
};

}  // namespace

IrregularFit best_irregular_partition(const BinarySample& sample, std::size_t dim,
                                      std::size_t min_cell) {
  min_cell = std::max<std::size_t>(min_cell, 1);
  if (dim == 0 || dim * min_cell > sample.n())
    throw InfeasibleDimension("cannot place " + std::to_string(dim) + " cells of at least " +
                              std::to_string(min_cell) + " points in n = " +
                              std::to_string(sample.n()));
  const SegmentTable table(sample, dim, min_cell);
  if (!table.feasible(dim))
    throw InfeasibleDimension("too few distinct design points for " + std::to_string(dim) +
                              " cells");
  return table.reconstruct(dim);
}

std::vector<IrregularFit> best_irregular_path(const BinarySample& sample, std::size_t max_dim,
                                              std::size_t min_cell) {
  min_cell = std::max<std::size_t>(min_cell, 1);
  max_dim = std::min(max_dim, sample.n() / min_cell);
  if (max_dim == 0) throw InfeasibleDimension("no feasible dimension");
  const SegmentTable table(sample, max_dim, min_cell);
  std::vector<IrregularFit> out;
  for (std::size_t d = 1; d <= max_dim; ++d)
    if (table.feasible(d)) out.push_back(table.reconstruct(d));
  return out;
}

}  // namespace penlog
