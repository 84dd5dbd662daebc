#include "terra/common/error.hpp"

#include <fmt/format.h>

namespace terra {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io-error";
    case ErrorCode::parse: return "parse-error";
    case ErrorCode::non_finite: return "non-finite-error";
    case ErrorCode::empty_cloud: return "empty-cloud-error";
    case ErrorCode::nonpositive_voxel: return "nonpositive-voxel-error";
    case ErrorCode::insufficient_points: return "insufficient-points-error";
    case ErrorCode::degenerate_data: return "degenerate-data-error";
    case ErrorCode::not_positive_definite: return "not-positive-definite-error";
    case ErrorCode::empty_feature_cloud: return "empty-feature-cloud-error";
    case ErrorCode::grid_too_small: return "grid-too-small-error";
    case ErrorCode::time_regression: return "time-regression-error";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch-error";
    case ErrorCode::geometry_mismatch: return "geometry-mismatch-error";
    case ErrorCode::no_overlap: return "no-overlap-error";
    case ErrorCode::missing_layer: return "missing-layer-error";
    case ErrorCode::invalid_argument: return "invalid-argument-error";
    case ErrorCode::config: return "config-error";
    case ErrorCode::internal: return "internal-error";
  }
  return "unknown-error";
}

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot, double value)
    : Error(ErrorCode::not_positive_definite,
            fmt::format("matrix not positive definite at pivot {} (value {:.3e})", pivot, value)),
      pivot_(pivot),
      value_(value) {}

}  // namespace terra
