#include "penlog/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "penlog/error.hpp"

namespace penlog {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

double inner_n(const VectorXd& u, const VectorXd& v) { return u.dot(v) / static_cast<double>(u.size()); }

VectorXd labels(const BinarySample& sample) {
  VectorXd y(static_cast<Eigen::Index>(sample.n()));
  for (std::size_t i = 0; i < sample.n(); ++i) y[static_cast<Eigen::Index>(i)] = sample.y(i);
  return y;
}

double objective(const VectorXd& f, const VectorXd& y) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) total += softplus(f[i]) - y[i] * f[i];
  return total / static_cast<double>(f.size());
}

VectorXd sigmoid_of(const VectorXd& f) { return f.unaryExpr([](double v) { return sigmoid(v); }); }

// Objective, gradient and Hessian of gamma_n (+ optional log barrier) in
// coefficient space, for a given fitted-value vector.
struct Problem {
  const MatrixXd& basis;
  const VectorXd y;
  double c0;
  double inv_n;

  Problem(const DictionaryModel& model, const BinarySample& sample, double c0_bound)
      : basis(model.basis), y(labels(sample)), c0(c0_bound), inv_n(1.0 / static_cast<double>(sample.n())) {}

  VectorXd fitted(const VectorXd& beta) const { return basis.transpose() * beta; }

  bool strictly_feasible(const VectorXd& f) const { return f.cwiseAbs().maxCoeff() < c0; }

  // weight = 1/t of the barrier; 0 means the plain contrast.
  double value(const VectorXd& f, double weight) const {
    double v = objective(f, y);
    if (weight > 0.0) {
      double barrier = 0.0;
      for (Eigen::Index i = 0; i < f.size(); ++i)
        barrier -= std::log(c0 - f[i]) + std::log(c0 + f[i]);
      v += weight * inv_n * barrier;
    }
    return v;
  }

  void derivatives(const VectorXd& f, double weight, VectorXd& grad, MatrixXd& hess) const {
    const VectorXd p = sigmoid_of(f);
    VectorXd r = p - y;
    VectorXd w = p.cwiseProduct(VectorXd::Ones(p.size()) - p);
    if (weight > 0.0) {
      for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double up = 1.0 / (c0 - f[i]);
        const double lo = 1.0 / (c0 + f[i]);
        r[i] += weight * (up - lo);
        w[i] += weight * (up * up + lo * lo);
      }
    }
    grad = inv_n * (basis * r);
    hess = inv_n * (basis * w.asDiagonal() * basis.transpose());
  }
};

VectorXd newton_direction(const MatrixXd& hess, const VectorXd& grad) {
  Eigen::LDLT<MatrixXd> ldlt(hess);
  VectorXd d = ldlt.solve(-grad);
  if (ldlt.info() != Eigen::Success || !d.allFinite() || grad.dot(d) >= 0.0) {
    // Flat curvature (separation): fall back to a regularised step.
    const double ridge = std::max(1e-12, 1e-8 * hess.diagonal().cwiseAbs().maxCoeff());
    MatrixXd reg = hess;
    reg.diagonal().array() += ridge;
    d = reg.ldlt().solve(-grad);
    if (!d.allFinite() || grad.dot(d) >= 0.0) d = -grad;
  }
  return d;
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

struct PhaseResult {
  VectorXd beta;
  double value = kInf;
  double grad_norm = kInf;
  std::size_t iterations = 0;
  bool converged = false;
};

PhaseResult unconstrained_newton(const Problem& prob, VectorXd beta, const FitConfig& cfg) {
  PhaseResult out;
  VectorXd grad;
  MatrixXd hess;
  VectorXd f = prob.fitted(beta);
  double val = prob.value(f, 0.0);
  out.beta = beta;
  out.value = val;
  for (std::size_t it = 0; it < cfg.max_iter; ++it) {
    prob.derivatives(f, 0.0, grad, hess);
    const double gnorm = grad.norm();
    out.grad_norm = gnorm;
    out.iterations = it;
    if (gnorm <= cfg.tol) {
      out.converged = true;
      return out;
    }
    const VectorXd d = newton_direction(hess, grad);
    const double slope = grad.dot(d);
    double step = 1.0;
    VectorXd trial_beta;
    VectorXd trial_f;
    double trial_val = kInf;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      trial_beta = beta + step * d;
      trial_f = prob.fitted(trial_beta);
      trial_val = prob.value(trial_f, 0.0);
      if (trial_val <= val + 1e-4 * step * slope) break;
    }
    if (!(trial_val <= val)) break;  // stalled at rounding level
    beta = std::move(trial_beta);
    f = std::move(trial_f);
    val = trial_val;
    out.beta = beta;
    out.value = val;
  }
  prob.derivatives(f, 0.0, grad, hess);
  out.grad_norm = grad.norm();
  out.converged = out.grad_norm <= cfg.tol;
  return out;
}

PhaseResult barrier_method(const Problem& prob, VectorXd beta, const FitConfig& cfg) {
  VectorXd f = prob.fitted(beta);
  const double top = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  if (top >= 0.5 * prob.c0) {
    beta *= 0.5 * prob.c0 / top;
    f = prob.fitted(beta);
  }

  // Duality gap of the barrier problem is 2 / t in the 1/n scaling; the
  // certificate adds half the Newton decrement of the last centering.
  const double gap_target = std::min(1e-3 * cfg.tol, 1e-10);
  PhaseResult out;
  std::size_t total_iter = 0;
  VectorXd grad;
  MatrixXd hess;
  double t = 1.0;
  double last_decrement = kInf;
  while (true) {
    const double weight = 1.0 / t;
    double val = prob.value(f, weight);
    last_decrement = kInf;
    for (std::size_t it = 0; it < cfg.max_iter; ++it, ++total_iter) {
      prob.derivatives(f, weight, grad, hess);
      const VectorXd d = newton_direction(hess, grad);
      last_decrement = std::max(0.0, -grad.dot(d));
      if (0.5 * last_decrement <= gap_target) break;
      double step = 1.0;
      VectorXd trial_beta = beta + step * d;
      VectorXd trial_f = prob.fitted(trial_beta);
      while (!prob.strictly_feasible(trial_f) && step > 1e-300) {
        step *= 0.5;
        trial_beta = beta + step * d;
        trial_f = prob.fitted(trial_beta);
      }
      double trial_val = prob.value(trial_f, weight);
      while (trial_val > val - 0.25 * step * last_decrement && step > 1e-14) {
        step *= 0.5;
        trial_beta = beta + step * d;
        trial_f = prob.fitted(trial_beta);
        trial_val = prob.value(trial_f, weight);
      }
      if (!(trial_val <= val)) break;  // rounding floor
      beta = std::move(trial_beta);
      f = std::move(trial_f);
      val = trial_val;
    }
    // Near the box, keep tightening until the active logits touch it.
    const double slack = prob.c0 - f.cwiseAbs().maxCoeff();
    const bool touching = slack >= 1e-3 * prob.c0 || slack <= 1e-2 * cfg.tol;
    if ((2.0 / t <= gap_target && touching) || t >= 1e18) break;
    t *= 10.0;
  }
  out.beta = beta;
  out.value = prob.value(f, 0.0);
  out.grad_norm = 2.0 / t + 0.5 * last_decrement;
  out.iterations = total_iter;
  out.converged = out.grad_norm <= cfg.tol;
  return out;
}

DictionaryFit finish(const Problem& prob, const PhaseResult& res, const FitConfig& cfg) {
  DictionaryFit fit;
  fit.coefficients = to_std(res.beta);
  const VectorXd f = prob.fitted(res.beta);
  fit.logit = FittedLogit::from_logits(to_std(f));
  fit.contrast = res.value;
  fit.kkt_residual = res.grad_norm;
  fit.iterations = res.iterations;
  fit.on_boundary = std::isfinite(cfg.c0_bound) && f.size() > 0 &&
                    f.cwiseAbs().maxCoeff() >= cfg.c0_bound - std::max(cfg.tol, 1e-9);
  return fit;
}

}  // namespace

void Dictionary::add(std::string name, std::function<double(double)> fn) {
  names.push_back(std::move(name));
  functions.push_back(std::move(fn));
}

Dictionary Dictionary::indicators(const PartitionModel& partition) {
  Dictionary dict;
  for (std::size_t k = 0; k < partition.dimension(); ++k)
    dict.add("cell" + std::to_string(k), [partition, k](double x) {
      return partition.cell_of(x) == k ? 1.0 : 0.0;
    });
  return dict;
}

Dictionary Dictionary::monomials(std::size_t degree) {
  Dictionary dict;
  for (std::size_t k = 0; k <= degree; ++k)
    dict.add("x^" + std::to_string(k), [k](double x) { return std::pow(x, static_cast<double>(k)); });
  return dict;
}

Dictionary Dictionary::cosines(std::size_t count) {
  Dictionary dict;
  if (count == 0) return dict;
  dict.add("1", [](double) { return 1.0; });
  for (std::size_t k = 1; k < count; ++k)
    dict.add("cos" + std::to_string(k), [k](double x) {
      return std::numbers::sqrt2 * std::cos(std::numbers::pi * static_cast<double>(k) * x);
    });
  return dict;
}

DictionaryModel orthonormalize_rows(const Eigen::MatrixXd& rows, std::vector<std::size_t> indices) {
  if (rows.rows() == 0) throw UsageError("model must select at least one dictionary function");
  if (indices.size() != static_cast<std::size_t>(rows.rows()))
    throw LengthMismatch(indices.size(), static_cast<std::size_t>(rows.rows()));
  std::vector<VectorXd> accepted;
  DictionaryModel model;
  for (Eigen::Index j = 0; j < rows.rows(); ++j) {
    VectorXd r = rows.row(j).transpose();
    const double initial = std::sqrt(inner_n(r, r));
    if (!(initial > 0.0)) continue;
    // Two Gram-Schmidt sweeps keep orthogonality at rounding level.
    for (int sweep = 0; sweep < 2; ++sweep)
      for (const VectorXd& q : accepted) r -= inner_n(r, q) * q;
    const double norm = std::sqrt(inner_n(r, r));
    if (norm < kRankTolerance * initial) continue;
    accepted.push_back(r / norm);
    model.retained.push_back(indices[static_cast<std::size_t>(j)]);
  }
  if (accepted.empty()) throw EmptyModel();
  model.indices = std::move(indices);
  model.basis.resize(static_cast<Eigen::Index>(accepted.size()), rows.cols());
  for (std::size_t j = 0; j < accepted.size(); ++j)
    model.basis.row(static_cast<Eigen::Index>(j)) = accepted[j].transpose();
  return model;
}

DictionaryModel orthonormalize(const Dictionary& dict, std::span<const std::size_t> indices,
                               const BinarySample& sample) {
  if (indices.empty()) throw UsageError("model must select at least one dictionary function");
  MatrixXd rows(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(sample.n()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= dict.size()) throw UsageError("dictionary index out of range");
    for (std::size_t i = 0; i < sample.n(); ++i)
      rows(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = dict.functions[indices[j]](sample.x(i));
  }
  return orthonormalize_rows(rows, {indices.begin(), indices.end()});
}

void FitConfig::validate() const {
  if (!(c0_bound > 0.0)) throw UsageError("C0 must be positive");
  if (!(tol > 0.0)) throw UsageError("tolerance must be positive");
  if (max_iter == 0) throw UsageError("max_iter must be positive");
}

double coefficient_contrast(const DictionaryModel& model, const BinarySample& sample,
                            std::span<const double> beta) {
  if (beta.size() != model.dimension()) throw LengthMismatch(model.dimension(), beta.size());
  const Problem prob(model, sample, kInf);
  const Eigen::Map<const VectorXd> b(beta.data(), static_cast<Eigen::Index>(beta.size()));
  return prob.value(prob.fitted(b), 0.0);
}

std::vector<double> coefficient_gradient(const DictionaryModel& model, const BinarySample& sample,
                                         std::span<const double> beta) {
  if (beta.size() != model.dimension()) throw LengthMismatch(model.dimension(), beta.size());
  const Problem prob(model, sample, kInf);
  const Eigen::Map<const VectorXd> b(beta.data(), static_cast<Eigen::Index>(beta.size()));
  VectorXd grad;
  MatrixXd hess;
  prob.derivatives(prob.fitted(b), 0.0, grad, hess);
  return to_std(grad);
}

DictionaryFit fit_mle(const DictionaryModel& model, const BinarySample& sample, const FitConfig& cfg,
                      std::optional<std::vector<double>> initial) {
  cfg.validate();
  if (model.n() != sample.n()) throw LengthMismatch(model.n(), sample.n());
  const Eigen::Index dim = static_cast<Eigen::Index>(model.dimension());
  VectorXd start = VectorXd::Zero(dim);
  if (initial) {
    if (initial->size() != model.dimension()) throw LengthMismatch(model.dimension(), initial->size());
    start = Eigen::Map<const VectorXd>(initial->data(), dim);
  }
  const Problem prob(model, sample, cfg.c0_bound);

  const PhaseResult free = unconstrained_newton(prob, start, cfg);
  const bool bounded = std::isfinite(cfg.c0_bound);
  if (free.converged && (!bounded || prob.fitted(free.beta).cwiseAbs().maxCoeff() <= cfg.c0_bound))
    return finish(prob, free, cfg);
  if (!bounded) throw NoConvergence(cfg.max_iter, to_std(free.beta), free.value);

  const PhaseResult boxed = barrier_method(prob, start, cfg);
  if (!boxed.converged) throw NoConvergence(cfg.max_iter, to_std(boxed.beta), boxed.value);
  return finish(prob, boxed, cfg);
}

}  // namespace penlog
