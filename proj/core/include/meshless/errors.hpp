#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace meshless {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or precondition violation detected before computing.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Least-squares problem at a point is too small or numerically singular.
class SingularStencil : public Error {
 public:
  SingularStencil(std::size_t point, const std::string& why)
      : Error("singular MLS stencil at point " + std::to_string(point) + ": " + why),
        point_(point) {}
  std::size_t point() const noexcept { return point_; }

 private:
  std::size_t point_;
};

class EmptyUpwindStencil : public Error {
 public:
  explicit EmptyUpwindStencil(std::size_t point)
      : Error("empty upwind stencil at point " + std::to_string(point)), point_(point) {}
  std::size_t point() const noexcept { return point_; }

 private:
  std::size_t point_;
};

class AllStencilsDeactivated : public Error {
 public:
  explicit AllStencilsDeactivated(std::size_t point)
      : Error("all WENO stencils deactivated at point " + std::to_string(point)),
        point_(point) {}
  std::size_t point() const noexcept { return point_; }

 private:
  std::size_t point_;
};

/// The integrated state contains NaN or Inf.
class NonFiniteState : public Error {
 public:
  explicit NonFiniteState(std::size_t step)
      : Error("non-finite state after step " + std::to_string(step)), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace meshless
