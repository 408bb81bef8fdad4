#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvdmm/dmm.hpp"
#include "mvdmm/geometry.hpp"
#include "mvdmm/learn.hpp"
#include "mvdmm/motion.hpp"
#include "mvdmm/neural.hpp"

namespace mvdmm {

enum class NetworkKind { c3d, desk };

NetworkKind parse_network_kind(std::string_view text);
std::string_view to_string(NetworkKind kind);

struct PipelineConfig {
  // Virtual views and temporal scales.
  std::vector<double> angles{-45, -30, -15, 0, 15, 30, 45};
  double pitch_deg = 0.0;
  std::vector<TemporalWindow> windows{TemporalWindow::of(5), TemporalWindow::of(10),
                                      TemporalWindow::all()};
  std::vector<std::size_t> rgb_windows{10, 16, 25};
  std::vector<Plane> planes{Plane::xy, Plane::yz, Plane::xz};
  std::vector<std::string> poses{"sitting", "standing"};

  // Rendering and clips.
  std::size_t render_height = 112;
  std::size_t render_width = 112;
  std::size_t dmm_lambda = 16;
  bool concat_planes = true;
  bool rgb_from_depth = false;

  // Geometry. focal <= 0 selects Intrinsics::for_frame; pivot <= 0 selects the
  // median nonzero depth of the first frame.
  std::optional<Intrinsics> intrinsics;
  double pivot_depth_mm = 0.0;
  bool fill_holes = true;
  BinParams bins;

  // Motion weighting.
  bool flow_weights = true;
  FlowParams flow;
  Normalization normalization = Normalization::per_pair;
  DmmOptions dmm;

  // Networks.
  NetworkKind network = NetworkKind::c3d;
  DeskNetParams desk;
  std::string weights_dir;
  std::uint64_t seed = 1;

  // Classifiers.
  bool pca = true;
  PcaTarget pca_target;
  bool pca_whiten = true;
  SvmParams svm;
  ScoreMode score_mode = ScoreMode::softmax;

  std::size_t workers = 1;
};

/// Throws ConfigError on empty angle/window/plane/pose sets or out-of-range values.
void validate(const PipelineConfig& cfg);

/// `key = value` lines, `[section]` headers and `#` comments. Lists are written
/// `[a, b, c]`. Unknown keys are rejected. Missing keys keep their defaults.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config: every key, in a fixed order.
std::string format_config(const PipelineConfig& cfg);
void save_config(const PipelineConfig& cfg, const std::filesystem::path& path);

/// Parses "a,b,c" (brackets optional).
std::vector<double> parse_angle_list(std::string_view text);
std::vector<TemporalWindow> parse_window_list(std::string_view text);

}  // namespace mvdmm
