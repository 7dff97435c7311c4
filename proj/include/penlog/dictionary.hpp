#pragma once

// Maximum likelihood over finite-dictionary models
//   S_m = span{phi_j, j in m},  subject to  max_i |f(x_i)| <= C0.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "penlog/core_model.hpp"
#include "penlog/regressogram.hpp"

namespace penlog {

struct Dictionary {
  std::vector<std::function<double(double)>> functions;
  std::vector<std::string> names;

  std::size_t size() const noexcept { return functions.size(); }
  void add(std::string name, std::function<double(double)> fn);

  /// Indicators of the cells of `partition`.
  static Dictionary indicators(const PartitionModel& partition);
  /// 1, x, ..., x^degree.
  static Dictionary monomials(std::size_t degree);
  /// 1, sqrt(2) cos(pi k x) for k = 1..count-1.
  static Dictionary cosines(std::size_t count);
};

/// Orthonormal basis (w.r.t. <u,v>_n = (1/n) sum u_i v_i) of the span of
/// the selected dictionary functions, evaluated at the design points.
struct DictionaryModel {
  std::vector<std::size_t> indices;   // requested subset m
  std::vector<std::size_t> retained;  // members of m that contributed a basis vector
  Eigen::MatrixXd basis;              // dimension x n, rows psi_j(x_i)

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(basis.rows()); }
  std::size_t n() const noexcept { return static_cast<std::size_t>(basis.cols()); }
};

/// Relative residual norm under which a Gram-Schmidt vector is dropped.
inline constexpr double kRankTolerance = 1e-10;

/// Modified Gram-Schmidt on the evaluation vectors. Throws EmptyModel.
DictionaryModel orthonormalize(const Dictionary& dict, std::span<const std::size_t> indices,
                               const BinarySample& sample);

/// Same, on precomputed evaluation rows (one row per candidate vector).
DictionaryModel orthonormalize_rows(const Eigen::MatrixXd& rows, std::vector<std::size_t> indices);

struct FitConfig {
  double c0_bound = 10.0;  // +inf disables the box
  double tol = 1e-8;
  std::size_t max_iter = 100;  // Newton iterations per solver phase

  void validate() const;
};

struct DictionaryFit {
  std::vector<double> coefficients;  // beta in the orthonormal basis
  FittedLogit logit;
  double contrast = 0.0;
  // Norm of the Lagrangian gradient plus complementarity gap; reduces to
  // the plain gradient norm for interior solutions.
  // Gradient norm for an interior solution; for a boundary one, the
  // barrier duality gap plus half the final Newton decrement.
  double kkt_residual = 0.0;
  bool on_boundary = false;
  std::size_t iterations = 0;
};

/// gamma_n(B^T beta) and its gradient in coefficient space.
double coefficient_contrast(const DictionaryModel& model, const BinarySample& sample,
                            std::span<const double> beta);
std::vector<double> coefficient_gradient(const DictionaryModel& model, const BinarySample& sample,
                                         std::span<const double> beta);

/// Minimises gamma_n over S_m intersected with the L_inf(C0) box.
/// Throws NoConvergence carrying the best iterate.
DictionaryFit fit_mle(const DictionaryModel& model, const BinarySample& sample,
                      const FitConfig& cfg = {},
                      std::optional<std::vector<double>> initial = std::nullopt);

}  // namespace penlog
