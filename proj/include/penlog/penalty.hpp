#pragma once

// Penalty families pen(m) = pen(D_m, n) and the weights L_D behind them.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace penlog {

/// Weights L_m, either constant or L_D = 2 + log(n / D).
class WeightScheme {
 public:
  enum class Rule { constant, dimension_dependent };

  static WeightScheme constant(double l);
  static WeightScheme dimension_dependent() { return WeightScheme(Rule::dimension_dependent, 0.0); }

  Rule rule() const noexcept { return rule_; }
  double constant_value() const noexcept { return constant_; }
  double weight(std::size_t dim, std::size_t n) const;

 private:
  WeightScheme(Rule rule, double l) : rule_(rule), constant_(l) {}
  Rule rule_;
  double constant_;
};

enum class PenaltyKind { aic, bic, linear, shape, weighted, theorem31 };

/// A penalty family with its multiplicative constant. The constant may be
/// left open (`scale` empty) to be calibrated from data.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::aic;
  std::optional<double> scale;
  WeightScheme weights = WeightScheme::dimension_dependent();

  static PenaltySpec aic() { return {PenaltyKind::aic, std::nullopt, WeightScheme::dimension_dependent()}; }
  static PenaltySpec bic() { return {PenaltyKind::bic, std::nullopt, WeightScheme::dimension_dependent()}; }
  /// c * D / n.
  static PenaltySpec linear(std::optional<double> c);
  /// mu * (D/n) [13 + 6 log(n/D) + 8 sqrt(2 + log(n/D))].
  static PenaltySpec shape(std::optional<double> mu);
  /// mu * (D/n) (1 + 6 L + 8 sqrt(L)).
  static PenaltySpec weighted(std::optional<double> mu, WeightScheme scheme);
  /// lambda * (D/n) (1/2 + sqrt(5 L))^2, the general-dictionary form.
  static PenaltySpec theorem31(std::optional<double> lambda, WeightScheme scheme);

  /// Families carrying a free multiplicative constant.
  bool has_scale() const noexcept { return kind != PenaltyKind::aic && kind != PenaltyKind::bic; }
  bool needs_calibration() const noexcept { return has_scale() && !scale; }
  PenaltySpec with_scale(double s) const;

  /// "aic" | "bic" | "lin:<c>" | "shape:<mu>" | "weighted:<mu>:<L|auto>" |
  /// "theorem31:<lambda>:<L|auto>", with "auto" in place of a constant
  /// marking it for calibration. Throws UsageError.
  static PenaltySpec parse(std::string_view text);
  std::string to_string() const;
};

/// pen(D, n). Throws DimensionOutOfRange unless 1 <= dim <= n, and
/// UsageError when the constant still awaits calibration.
double evaluate(const PenaltySpec& pen, std::size_t dim, std::size_t n);

/// The penalty shape with the multiplicative constant set to one.
double evaluate_shape(const PenaltySpec& pen, std::size_t dim, std::size_t n);

enum class CollectionKind { regular, irregular };

/// Partial sum of Sigma = sum_D exp(-L_D D) Card{m : |m| = D} over
/// D = 1..n, with Card = 1 (regular) or C(n-1, D-1) (irregular).
double sigma_diagnostic(const WeightScheme& scheme, std::size_t n,
                        CollectionKind collection = CollectionKind::regular);

}  // namespace penlog
