#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace cleb {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A combinatorial enumeration would exceed the configured vertex cap.
class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

/// A generator produced no vertex (e.g. a graph without a source-sink path).
class EmptySetError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped before reaching its optimality tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double gap) : Error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

/// A point lies outside Conv(S). `certificate()` is a direction c with
/// c.v <= c.x* < c.w for every vertex v, where x* is the nearest hull point.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, Eigen::VectorXd certificate, double margin)
      : Error(what), certificate_(std::move(certificate)), margin_(margin) {}
  const Eigen::VectorXd& certificate() const noexcept { return certificate_; }
  double margin() const noexcept { return margin_; }

 private:
  Eigen::VectorXd certificate_;
  double margin_;
};

/// The dual point grad F(w) - estimate left the range of grad F.
class StepInfeasibleError : public Error {
 public:
  StepInfeasibleError(const std::string& what, std::size_t coordinate)
      : Error(what), coordinate_(coordinate) {}
  std::size_t coordinate() const noexcept { return coordinate_; }

 private:
  std::size_t coordinate_;
};

/// A sampling probability needed by an estimator underflowed.
class NumericUnderflowError : public Error {
 public:
  using Error::Error;
};

/// The exploration moment matrix of the spanner estimator is rank deficient.
class EstimatorDegenerateError : public Error {
 public:
  using Error::Error;
};

/// A linear solve left a residual above tolerance.
class ResidualError : public Error {
 public:
  ResidualError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// An evaluation mode was requested for a setting that does not support it.
class ModeError : public Error {
 public:
  using Error::Error;
};

}  // namespace cleb
