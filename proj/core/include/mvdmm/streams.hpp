#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mvdmm/config.hpp"

namespace mvdmm {

enum class StreamKind { dmm, rgb };

/// One network input stream: a DMM stream (pose, plane, window, angle) or an
/// RGB stream (pose, rgb window).
struct StreamId {
  StreamKind kind = StreamKind::dmm;
  std::string pose;
  Plane plane = Plane::xy;
  TemporalWindow window;
  double angle_deg = 0.0;
  std::size_t rgb_window = 0;

  /// e.g. "standing/dmm/xy/w5/a-30" or "standing/rgb/r16".
  [[nodiscard]] std::string name() const;
  /// name() with '/' replaced by '_', usable as a file name.
  [[nodiscard]] std::string file_stem() const;

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

/// A classifier (PCA + SVM) fed by one or more streams. With plane
/// concatenation a DMM slot owns the xy, yz and xz streams of one (window, angle).
struct ClassifierSlot {
  StreamKind kind = StreamKind::dmm;
  std::string pose;
  TemporalWindow window;
  double angle_deg = 0.0;
  std::optional<Plane> plane;
  std::size_t rgb_window = 0;
  std::vector<std::size_t> streams;  // indices into StreamPlan::streams, in concat order

  [[nodiscard]] std::string name() const;
  [[nodiscard]] std::string file_stem() const;
};

struct StreamPlan {
  std::vector<StreamId> streams;
  std::vector<ClassifierSlot> slots;

  [[nodiscard]] std::size_t dmm_stream_count() const;
  [[nodiscard]] std::size_t rgb_stream_count() const;
};

/// poses x (planes x angles x windows + rgb windows)
std::size_t expected_stream_count(const PipelineConfig& cfg);

/// Deterministic enumeration: pose-major, DMM streams (window, angle, plane) then RGB windows.
/// Throws ConfigError for invalid configurations.
StreamPlan build_streams(const PipelineConfig& cfg);

/// Network for a stream, weights seeded from cfg.seed and the stream name, or
/// loaded from cfg.weights_dir when a matching file exists there.
NetworkSpec stream_network(const PipelineConfig& cfg, const StreamPlan& plan, std::size_t stream);

/// Shape of a stream's network input.
Shape4 stream_input_shape(const PipelineConfig& cfg, const StreamId& id);

std::string format_angle(double deg);

}  // namespace mvdmm
