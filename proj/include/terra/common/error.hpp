#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace terra {

enum class ErrorCode {
  io,
  parse,
  non_finite,
  empty_cloud,
  nonpositive_voxel,
  insufficient_points,
  degenerate_data,
  not_positive_definite,
  empty_feature_cloud,
  grid_too_small,
  time_regression,
  dimension_mismatch,
  geometry_mismatch,
  no_overlap,
  missing_layer,
  invalid_argument,
  config,
  internal,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable category alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the Cholesky factorization; carries the first failing pivot.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot, double value);

  std::size_t pivot() const noexcept { return pivot_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t pivot_;
  double value_;
};

}  // namespace terra
