#include "penlog/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "penlog/error.hpp"

namespace penlog {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// p0 * log(p0 / p) with 0 log(0/q) = 0 and p0 log(p0/0) = +inf.
double xlogx_over(double p0, double p) {
  if (p0 == 0.0) return 0.0;
  if (p == 0.0) return kInf;
  return p0 * std::log(p0 / p);
}

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw LengthMismatch(a.size(), b.size());
  if (a.empty()) throw DataError("probability vectors must be non-empty");
}

}  // namespace

BinarySample::BinarySample(std::vector<double> xs, std::vector<std::uint8_t> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size()) throw LengthMismatch(xs_.size(), ys_.size());
  if (xs_.empty()) throw DataError("sample must contain at least one observation");
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!(xs_[i] >= 0.0 && xs_[i] <= 1.0))
      throw DataError("design point " + std::to_string(i) + " outside [0,1]");
    if (ys_[i] > 1) throw DataError("label " + std::to_string(i) + " not in {0,1}");
    if (i > 0 && xs_[i] < xs_[i - 1]) throw DataError("design points must be sorted");
  }
}

BinarySample BinarySample::from_unsorted(std::vector<double> xs, std::vector<std::uint8_t> ys) {
  if (xs.size() != ys.size()) throw LengthMismatch(xs.size(), ys.size());
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> sx(xs.size());
  std::vector<std::uint8_t> sy(ys.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    sx[k] = xs[order[k]];
    sy[k] = ys[order[k]];
  }
  return BinarySample(std::move(sx), std::move(sy));
}

FittedLogit FittedLogit::from_logits(std::vector<double> logits) {
  FittedLogit out;
  out.probs.resize(logits.size());
  std::transform(logits.begin(), logits.end(), out.probs.begin(), sigmoid);
  out.values = std::move(logits);
  return out;
}

FittedLogit FittedLogit::from_probs(std::vector<double> probs) {
  FittedLogit out;
  out.values.resize(probs.size());
  std::transform(probs.begin(), probs.end(), out.values.begin(), logit);
  out.probs = std::move(probs);
  return out;
}

std::vector<double> TrueFunction::logits_at(const BinarySample& sample) const {
  std::vector<double> out(sample.n());
  for (std::size_t i = 0; i < sample.n(); ++i) out[i] = evaluator(sample.x(i));
  return out;
}

std::vector<double> TrueFunction::probs_at(const BinarySample& sample) const {
  auto out = logits_at(sample);
  std::transform(out.begin(), out.end(), out.begin(), sigmoid);
  return out;
}

bool TrueFunction::satisfies_bound(const BinarySample& sample) const {
  if (!bound_c1) return true;
  const auto f = logits_at(sample);
  return std::all_of(f.begin(), f.end(), [&](double v) { return std::abs(v) <= *bound_c1; });
}

bool TrueFunction::satisfies_floor(const BinarySample& sample) const {
  if (!rho) return true;
  const auto p = probs_at(sample);
  return std::all_of(p.begin(), p.end(), [&](double v) { return v >= *rho && 1.0 - v >= *rho; });
}

double sigmoid(double f) noexcept {
  if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
  const double e = std::exp(f);
  return e / (1.0 + e);
}

double logit(double p) noexcept {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return std::log(p) - std::log1p(-p);
}

double softplus(double f) noexcept {
  if (f == kInf) return kInf;
  return std::max(f, 0.0) + std::log1p(std::exp(-std::abs(f)));
}

double bernoulli_entropy(double p) noexcept {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

double contrast(const BinarySample& sample, std::span<const double> logits) {
  if (logits.size() != sample.n()) throw LengthMismatch(sample.n(), logits.size());
  // log(1 + e^f) - y f equals softplus(f) for y = 0 and softplus(-f) for y = 1.
  double total = 0.0;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const double f = logits[i];
    if (std::isnan(f)) throw NonFiniteContrast(i);
    const double term = sample.y(i) == 1 ? softplus(-f) : softplus(f);
    if (!std::isfinite(term)) throw NonFiniteContrast(i);
    total += term;
  }
  return total / static_cast<double>(sample.n());
}

double contrast(const BinarySample& sample, const FittedLogit& logit) {
  return contrast(sample, std::span<const double>(logit.values));
}

double kl_divergence(std::span<const double> p0, std::span<const double> p) {
  check_lengths(p0, p);
  double total = 0.0;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    total += xlogx_over(p0[i], p[i]) + xlogx_over(1.0 - p0[i], 1.0 - p[i]);
    if (total == kInf) return kInf;
  }
  return total / static_cast<double>(p0.size());
}

double hellinger_sq(std::span<const double> p0, std::span<const double> p) {
  check_lengths(p0, p);
  double total = 0.0;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    const double a = std::sqrt(p0[i]) - std::sqrt(p[i]);
    const double b = std::sqrt(1.0 - p0[i]) - std::sqrt(1.0 - p[i]);
    total += a * a + b * b;
  }
  return std::min(1.0, total / (2.0 * static_cast<double>(p0.size())));
}

double empirical_norm_sq(std::span<const double> f) {
  if (f.empty()) throw DataError("empirical norm of an empty vector");
  double total = 0.0;
  for (double v : f) total += v * v;
  return total / static_cast<double>(f.size());
}

}  // namespace penlog
