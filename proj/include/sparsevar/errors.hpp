#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace sparsevar {

/// Failure classes. The numeric value is the CLI exit status.
enum class ErrorClass : int {
  kConfig = 2,
  kData = 3,
  kNumeric = 4,
  kInternal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what)
      : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const { return class_; }

 private:
  ErrorClass class_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorClass::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what)
      : Error(ErrorClass::kData, what) {}
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

/// A component series with zero sample variance.
class DegenerateInputError : public DataError {
 public:
  DegenerateInputError(const std::string& what, int component)
      : DataError(what), component_(component) {}
  int component() const { return component_; }

 private:
  int component_;
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorClass::kNumeric, what) {}
};

class StabilityError : public NumericError {
 public:
  StabilityError(const std::string& what, double radius)
      : NumericError(what), radius_(radius) {}
  double spectral_radius() const { return radius_; }

 private:
  double radius_;
};

class SingularityError : public NumericError {
 public:
  using NumericError::NumericError;
};

class FactorizationError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// An iterative method hit its iteration cap. Carries the last iterate.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, Eigen::MatrixXd last_iterate,
                   long iterations)
      : NumericError(what),
        last_(std::move(last_iterate)),
        iterations_(iterations) {}
  const Eigen::MatrixXd& last_iterate() const { return last_; }
  long iterations() const { return iterations_; }

 private:
  Eigen::MatrixXd last_;
  long iterations_;
};

class LpInfeasibleError : public NumericError {
 public:
  using NumericError::NumericError;
};

class LpUnboundedError : public NumericError {
 public:
  using NumericError::NumericError;
};

class PivotLimitError : public NumericError {
 public:
  PivotLimitError(const std::string& what, long pivots)
      : NumericError(what), pivots_(pivots) {}
  long pivots() const { return pivots_; }

 private:
  long pivots_;
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what)
      : Error(ErrorClass::kInternal, what) {}
};

}  // namespace sparsevar
