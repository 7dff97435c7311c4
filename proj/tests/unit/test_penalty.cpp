#include <cmath>

#include "doctest.h"
#include "penlog/error.hpp"
#include "penlog/penalty.hpp"

using namespace penlog;

TEST_CASE("penalty examples") {
  CHECK(evaluate(PenaltySpec::aic(), 3, 100) == doctest::Approx(0.03).epsilon(1e-15));
  CHECK(evaluate(PenaltySpec::bic(), 3, 100) == doctest::Approx(3.0 * std::log(100.0) / 200.0));
  CHECK(evaluate(PenaltySpec::linear(2.5), 4, 100) == doctest::Approx(0.1));
  CHECK(evaluate(PenaltySpec::shape(1.0), 50, 50) == doctest::Approx(24.31370849898476).epsilon(1e-14));
  CHECK(evaluate(PenaltySpec::weighted(1.0, WeightScheme::dimension_dependent()), 50, 50) ==
        doctest::Approx(13.0 + 8.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(evaluate(PenaltySpec::weighted(2.0, WeightScheme::constant(1.0)), 5, 100) == doctest::Approx(2.0 * 0.05 * 15.0));
  // lambda (D/n) (1/2 + sqrt(5 L))^2 with L = 0.2: 0.2 * 1.5^2.
  CHECK(evaluate(PenaltySpec::theorem31(1.0, WeightScheme::constant(0.2)), 2, 10) == doctest::Approx(0.45));
}

TEST_CASE("penalty domain errors") {
  CHECK_THROWS_AS(evaluate(PenaltySpec::aic(), 0, 10), DimensionOutOfRange);
  CHECK_THROWS_AS(evaluate(PenaltySpec::aic(), 11, 10), DimensionOutOfRange);
  CHECK_THROWS_AS(evaluate(PenaltySpec::shape(std::nullopt), 1, 10), UsageError);
  CHECK_THROWS_AS(PenaltySpec::linear(0.0), UsageError);
  CHECK_THROWS_AS(PenaltySpec::aic().with_scale(2.0), UsageError);
  CHECK_THROWS_AS(WeightScheme::constant(-1.0), UsageError);
}

TEST_CASE("shape penalty equals the weighted penalty with L_D") {
  const auto shape = PenaltySpec::shape(1.7);
  const auto weighted = PenaltySpec::weighted(1.7, WeightScheme::dimension_dependent());
  for (std::size_t n = 1; n <= 400; ++n)
    for (std::size_t d = 1; d <= n; ++d) {
      const double a = evaluate(shape, d, n);
      CHECK(std::abs(a - evaluate(weighted, d, n)) <= 1e-12 * std::max(1.0, a));
    }
}

TEST_CASE("penalties increase with the dimension") {
  const std::vector<PenaltySpec> specs{PenaltySpec::aic(),
                                       PenaltySpec::bic(),
                                       PenaltySpec::linear(3.0),
                                       PenaltySpec::weighted(1.0, WeightScheme::constant(0.7)),
                                       PenaltySpec::theorem31(1.0, WeightScheme::dimension_dependent()),
                                       PenaltySpec::theorem31(1.0, WeightScheme::constant(2.0))};
  for (const auto& p : specs)
    for (std::size_t n : {2u, 17u, 300u})
      for (std::size_t d = 2; d <= n; ++d) CHECK(evaluate(p, d, n) > evaluate(p, d - 1, n));

  // Shape: every n up to 10^4.
  std::size_t violations = 0;
  const auto shape = PenaltySpec::shape(1.0);
  for (std::size_t n = 2; n <= 10000; ++n) {
    double prev = evaluate(shape, 1, n);
    for (std::size_t d = 2; d <= n; ++d) {
      const double v = evaluate(shape, d, n);
      if (!(v > prev)) ++violations;
      prev = v;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("bic exceeds aic exactly when log n > 2") {
  for (std::size_t n : {5u, 10u, 1000u}) {
    const bool bigger = evaluate(PenaltySpec::bic(), 3, n) > evaluate(PenaltySpec::aic(), 3, n);
    CHECK(bigger == (std::log(static_cast<double>(n)) > 2.0));
  }
  CHECK_FALSE(evaluate(PenaltySpec::bic(), 1, 5) > evaluate(PenaltySpec::aic(), 1, 5));
  CHECK(evaluate(PenaltySpec::bic(), 1, 10) > evaluate(PenaltySpec::aic(), 1, 10));
}

TEST_CASE("penalty config strings") {
  CHECK(PenaltySpec::parse("aic").kind == PenaltyKind::aic);
  CHECK(PenaltySpec::parse("bic").kind == PenaltyKind::bic);
  const auto lin = PenaltySpec::parse("lin:2.5");
  CHECK(lin.kind == PenaltyKind::linear);
  CHECK(*lin.scale == 2.5);
  CHECK(PenaltySpec::parse("shape:auto").needs_calibration());
  const auto w = PenaltySpec::parse("weighted:1.5:auto");
  CHECK(w.weights.rule() == WeightScheme::Rule::dimension_dependent);
  const auto wc = PenaltySpec::parse("weighted:1.5:0.75");
  CHECK(wc.weights.constant_value() == 0.75);
  for (const char* text : {"aic", "bic", "lin:auto", "shape:0.25", "weighted:2:auto", "weighted:auto:1.5",
                           "theorem31:0.5:auto"}) {
    const auto spec = PenaltySpec::parse(text);
    const auto again = PenaltySpec::parse(spec.to_string());
    CHECK(again.to_string() == spec.to_string());
    if (!spec.needs_calibration()) CHECK(evaluate(again, 3, 40) == evaluate(spec, 3, 40));
  }
  for (const char* bad : {"", "aic:1", "lin", "lin:x", "lin:-1", "shape:1:2", "weighted:1", "mdl", "lin:1e999"})
    CHECK_THROWS_AS(PenaltySpec::parse(bad), UsageError);
}

TEST_CASE("sigma diagnostic") {
  CHECK(sigma_diagnostic(WeightScheme::constant(1.0), 200) == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-12));
  CHECK(sigma_diagnostic(WeightScheme::constant(0.0), 1) == 1.0);
  const double irregular = sigma_diagnostic(WeightScheme::dimension_dependent(), 50, CollectionKind::irregular);
  CHECK(irregular > 0.0);
  CHECK(irregular <= 1.0 / (std::exp(1.0) - 1.0));
  // Large n stays finite thanks to log-domain binomials.
  CHECK(std::isfinite(sigma_diagnostic(WeightScheme::dimension_dependent(), 1000, CollectionKind::irregular)));
}
