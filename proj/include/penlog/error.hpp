#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace penlog {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input values or shapes (bad data, not bad code).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Caller misuse: bad option strings, empty inputs where a list is required.
class UsageError : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public DataError {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : DataError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class NonFiniteContrast : public DataError {
 public:
  explicit NonFiniteContrast(std::size_t index)
      : DataError("infinite logit conflicts with label at observation " + std::to_string(index)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class InfeasibleDimension : public DataError {
 public:
  using DataError::DataError;
};

class DimensionOutOfRange : public DataError {
 public:
  DimensionOutOfRange(std::size_t dim, std::size_t n)
      : DataError("dimension " + std::to_string(dim) + " outside [1, " + std::to_string(n) + "]") {}
};

class EmptyModel : public DataError {
 public:
  EmptyModel() : DataError("every basis vector collapsed during orthonormalization") {}
};

class NoConvergence : public Error {
 public:
  NoConvergence(std::size_t max_iter, std::vector<double> best_coefficients, double best_contrast)
      : Error("no convergence within " + std::to_string(max_iter) + " iterations"),
        max_iter_(max_iter),
        best_coefficients_(std::move(best_coefficients)),
        best_contrast_(best_contrast) {}

  std::size_t max_iter() const noexcept { return max_iter_; }
  const std::vector<double>& best_coefficients() const noexcept { return best_coefficients_; }
  double best_contrast() const noexcept { return best_contrast_; }

 private:
  std::size_t max_iter_;
  std::vector<double> best_coefficients_;
  double best_contrast_;
};

class EmptyCollection : public UsageError {
 public:
  EmptyCollection() : UsageError("model collection is empty") {}
};

class NoJump : public DataError {
 public:
  NoJump() : DataError("selected dimension is constant over the kappa grid") {}
};

class UnknownTruth : public UsageError {
 public:
  explicit UnknownTruth(const std::string& name) : UsageError("unknown truth function: " + name) {}
};

/// Malformed input line (1-based line number, header is line 1).
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed value outside its admissible domain.
class DomainError : public DataError {
 public:
  DomainError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyFile : public DataError {
 public:
  explicit EmptyFile(const std::string& path) : DataError("no data rows in " + path) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace penlog
