#pragma once

// Data model of the fixed-design logistic regression problem: the binary
// sample, the logistic link, the empirical contrast and the divergences
// between Bernoulli product measures.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace penlog {

/// Observations (x_i, Y_i), sorted by design point.
///
/// Design points live in [0,1] and are treated as deterministic once
/// ingested. Labels are 0 or 1.
class BinarySample {
 public:
  /// Validates and stores; `xs` must already be sorted non-decreasing.
  BinarySample(std::vector<double> xs, std::vector<std::uint8_t> ys);

  /// Sorts the pairs by x (stable for equal x) before validating.
  static BinarySample from_unsorted(std::vector<double> xs, std::vector<std::uint8_t> ys);

  std::size_t n() const noexcept { return xs_.size(); }
  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const std::uint8_t> ys() const noexcept { return ys_; }
  double x(std::size_t i) const { return xs_[i]; }
  int y(std::size_t i) const { return ys_[i]; }

 private:
  std::vector<double> xs_;
  std::vector<std::uint8_t> ys_;
};

/// Logits f(x_i) at the design points and the matching probabilities.
/// Infinite logits are legal and map to probabilities 0 and 1.
struct FittedLogit {
  std::vector<double> values;
  std::vector<double> probs;

  static FittedLogit from_logits(std::vector<double> logits);
  static FittedLogit from_probs(std::vector<double> probs);
  std::size_t size() const noexcept { return values.size(); }
};

/// The regression function f0 with optional boundedness witnesses.
struct TrueFunction {
  std::string name;
  std::function<double(double)> evaluator;
  std::optional<double> bound_c1;  // max |f0(x_i)| <= c1
  std::optional<double> rho;       // rho <= pi_f0(x_i) <= 1 - rho

  double operator()(double x) const { return evaluator(x); }

  /// f0 at every design point of `sample`.
  std::vector<double> logits_at(const BinarySample& sample) const;
  /// pi_f0 at every design point of `sample`.
  std::vector<double> probs_at(const BinarySample& sample) const;

  /// Spot-checks the boundedness witnesses at the design points.
  bool satisfies_bound(const BinarySample& sample) const;
  bool satisfies_floor(const BinarySample& sample) const;
};

double sigmoid(double f) noexcept;

/// log(p / (1 - p)), with logit(0) = -inf and logit(1) = +inf.
double logit(double p) noexcept;

/// log(1 + e^f) without overflow; softplus(+inf) = +inf, softplus(-inf) = 0.
double softplus(double f) noexcept;

/// Bernoulli entropy -p log p - (1-p) log(1-p) with 0 log 0 = 0.
double bernoulli_entropy(double p) noexcept;

/// gamma_n(f) = (1/n) sum [log(1 + e^{f_i}) - Y_i f_i].
/// Throws NonFiniteContrast when an infinite logit points away from its label.
double contrast(const BinarySample& sample, std::span<const double> logits);
double contrast(const BinarySample& sample, const FittedLogit& logit);

/// Per-coordinate Bernoulli KL averaged over coordinates; may be +inf.
double kl_divergence(std::span<const double> p0, std::span<const double> p);

/// Squared Hellinger distance between Bernoulli product measures,
/// normalised by n so that it lies in [0,1].
double hellinger_sq(std::span<const double> p0, std::span<const double> p);

/// ||f||_n^2 = (1/n) sum f_i^2.
double empirical_norm_sq(std::span<const double> f);

}  // namespace penlog
