#pragma once

#include <stdexcept>
#include <string>

namespace meshrag {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An operation received zero points, zero faces, or zero total area.
struct EmptyGeometryError : Error {
  using Error::Error;
};

/// A transform's 3x3 linear block is not invertible.
struct SingularTransformError : Error {
  using Error::Error;
};

/// A sample/selection count is out of range for the input.
struct BadCountError : Error {
  using Error::Error;
};

/// A geometry collapses to a point (all AABB extents zero).
struct DegenerateExtentError : Error {
  using Error::Error;
};

/// An operation requires per-point normals and the cloud has none.
struct NoNormalsError : Error {
  using Error::Error;
};

/// ICP found no correspondence pairs on its first iteration.
struct NoCorrespondencesError : Error {
  using Error::Error;
};

/// A generator or segmenter backend call failed.
struct BackendError : Error {
  BackendError(const std::string& what, int id = -1) : Error(what), failed_id(id) {}
  /// Prompt index or part id the failure belongs to, -1 if unknown.
  int failed_id;
};

/// Automatic segmentation produced no surviving cluster.
struct EmptySegmentationError : Error {
  using Error::Error;
};

/// Residual extraction kept no points: nothing to edit.
struct EmptyResidualError : Error {
  using Error::Error;
};

/// A mock backend was asked for a part id it does not know.
struct UnknownPartError : Error {
  using Error::Error;
};

/// Every part of a pipeline run failed.
struct PipelineEmptyError : Error {
  using Error::Error;
};

/// File reading/writing or format violation.
struct IoError : Error {
  using Error::Error;
};

/// Invalid or contradictory configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace meshrag
