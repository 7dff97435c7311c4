#include "penlog/penalty.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

#include "penlog/error.hpp"

namespace penlog {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::optional<double> parse_constant(std::string_view token, std::string_view full) {
  if (token == "auto") return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value))
    throw UsageError("bad constant '" + std::string(token) + "' in penalty '" + std::string(full) + "'");
  return value;
}

WeightScheme parse_weights(std::string_view token, std::string_view full) {
  const auto l = parse_constant(token, full);
  return l ? WeightScheme::constant(*l) : WeightScheme::dimension_dependent();
}

void check_scale(const std::optional<double>& s) {
  if (s && !(*s > 0.0)) throw UsageError("penalty constant must be positive");
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_constant(const std::optional<double>& v) { return v ? format_number(*v) : "auto"; }

std::string format_weights(const WeightScheme& w) {
  return w.rule() == WeightScheme::Rule::constant ? format_number(w.constant_value()) : "auto";
}

}  // namespace

WeightScheme WeightScheme::constant(double l) {
  if (!(l >= 0.0) || !std::isfinite(l)) throw UsageError("weight L must be finite and non-negative");
  return WeightScheme(Rule::constant, l);
}

double WeightScheme::weight(std::size_t dim, std::size_t n) const {
  if (rule_ == Rule::constant) return constant_;
  return 2.0 + std::log(static_cast<double>(n) / static_cast<double>(dim));
}

PenaltySpec PenaltySpec::linear(std::optional<double> c) {
  check_scale(c);
  return {PenaltyKind::linear, c, WeightScheme::dimension_dependent()};
}

PenaltySpec PenaltySpec::shape(std::optional<double> mu) {
  check_scale(mu);
  return {PenaltyKind::shape, mu, WeightScheme::dimension_dependent()};
}

PenaltySpec PenaltySpec::weighted(std::optional<double> mu, WeightScheme scheme) {
  check_scale(mu);
  return {PenaltyKind::weighted, mu, scheme};
}

PenaltySpec PenaltySpec::theorem31(std::optional<double> lambda, WeightScheme scheme) {
  check_scale(lambda);
  return {PenaltyKind::theorem31, lambda, scheme};
}

PenaltySpec PenaltySpec::with_scale(double s) const {
  if (!has_scale()) throw UsageError(to_string() + " has no free constant");
  check_scale(s);
  PenaltySpec out = *this;
  out.scale = s;
  return out;
}

PenaltySpec PenaltySpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  const std::string_view head = parts[0];
  auto arity = [&](std::size_t expected) {
    if (parts.size() != expected) throw UsageError("malformed penalty '" + std::string(text) + "'");
  };
  if (head == "aic") {
    arity(1);
    return aic();
  }
  if (head == "bic") {
    arity(1);
    return bic();
  }
  if (head == "lin") {
    arity(2);
    return linear(parse_constant(parts[1], text));
  }
  if (head == "shape") {
    arity(2);
    return shape(parse_constant(parts[1], text));
  }
  if (head == "weighted") {
    arity(3);
    return weighted(parse_constant(parts[1], text), parse_weights(parts[2], text));
  }
  if (head == "theorem31") {
    arity(3);
    return theorem31(parse_constant(parts[1], text), parse_weights(parts[2], text));
  }
  throw UsageError("unknown penalty '" + std::string(text) + "'");
}

std::string PenaltySpec::to_string() const {
  switch (kind) {
    case PenaltyKind::aic: return "aic";
    case PenaltyKind::bic: return "bic";
    case PenaltyKind::linear: return "lin:" + format_constant(scale);
    case PenaltyKind::shape: return "shape:" + format_constant(scale);
    case PenaltyKind::weighted: return "weighted:" + format_constant(scale) + ":" + format_weights(weights);
    case PenaltyKind::theorem31: return "theorem31:" + format_constant(scale) + ":" + format_weights(weights);
  }
  return "?";
}

double evaluate_shape(const PenaltySpec& pen, std::size_t dim, std::size_t n) {
  if (dim < 1 || dim > n) throw DimensionOutOfRange(dim, n);
  const double ratio = static_cast<double>(dim) / static_cast<double>(n);
  switch (pen.kind) {
    case PenaltyKind::aic: return ratio;
    case PenaltyKind::bic: return std::log(static_cast<double>(n)) / (2.0 * static_cast<double>(n)) * static_cast<double>(dim);
    case PenaltyKind::linear: return ratio;
    case PenaltyKind::shape: {
      const double lg = std::log(static_cast<double>(n) / static_cast<double>(dim));
      return ratio * (13.0 + 6.0 * lg + 8.0 * std::sqrt(2.0 + lg));
    }
    case PenaltyKind::weighted: {
      const double l = pen.weights.weight(dim, n);
      return ratio * (1.0 + 6.0 * l + 8.0 * std::sqrt(l));
    }
    case PenaltyKind::theorem31: {
      const double root = 0.5 + std::sqrt(5.0 * pen.weights.weight(dim, n));
      return ratio * root * root;
    }
  }
  return 0.0;
}

double evaluate(const PenaltySpec& pen, std::size_t dim, std::size_t n) {
  const double base = evaluate_shape(pen, dim, n);
  if (!pen.has_scale()) return base;
  if (!pen.scale) throw UsageError("penalty " + pen.to_string() + " must be calibrated before use");
  return *pen.scale * base;
}

double sigma_diagnostic(const WeightScheme& scheme, std::size_t n, CollectionKind collection) {
  if (n == 0) throw DataError("sigma diagnostic needs n >= 1");
  const double lgn = std::lgamma(static_cast<double>(n));
  double total = 0.0;
  for (std::size_t d = 1; d <= n; ++d) {
    const double dd = static_cast<double>(d);
    double log_card = 0.0;
    if (collection == CollectionKind::irregular)
      log_card = lgn - std::lgamma(dd) - std::lgamma(static_cast<double>(n - d + 1));
    total += std::exp(log_card - scheme.weight(d, n) * dd);
  }
  return total;
}

}  // namespace penlog
