#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mvdmm/config.hpp"
#include "mvdmm/dataset.hpp"
#include "mvdmm/geometry.hpp"

namespace mvdmm {

/// Parameters of the desk-scale synthetic action set. Known actions are
/// translate, oscillate, arc, push and static.
struct SynthSpec {
  std::vector<std::string> actions{"translate", "oscillate", "arc"};
  std::size_t subjects = 6;
  std::size_t cameras = 2;
  std::size_t repetitions = 1;
  std::size_t frames = 40;
  std::size_t width = 64;
  std::size_t height = 48;
  double camera_step_deg = 30.0;
  double pivot_depth_mm = 2000.0;
  double depth_noise_mm = 6.0;
  double rgb_noise = 8.0;
  /// Relative per-subject and per-take spread of speed, amplitude and placement.
  double jitter = 0.25;
  std::string pose = "standing";
  bool rgb = true;
};

/// Axis-aligned box in scene coordinates (the 0-degree camera frame, millimeters).
struct SceneBox {
  Point3 lo;
  Point3 hi;
  Rgb color;
};

using SceneFrame = std::vector<SceneBox>;

/// Yaw of camera c about the pivot: step * c - step * (cameras - 1) / 2.
double camera_yaw_deg(const SynthSpec& spec, std::size_t camera);

/// Box layout of every frame of one take.
std::vector<SceneFrame> synthetic_scene(const SynthSpec& spec, std::size_t action,
                                        std::size_t subject, std::size_t repetition,
                                        std::uint64_t seed);

/// Ray-cast depth as seen by a camera yawed `yaw_deg` about the pivot.
/// `noise_seed` of 0 renders noise-free depth.
DepthFrame render_depth(const SceneFrame& scene, const SynthSpec& spec, double yaw_deg,
                        std::uint64_t noise_seed = 0);
ColorImage render_rgb(const SceneFrame& scene, const SynthSpec& spec, double yaw_deg,
                      std::uint64_t noise_seed = 0);

LoadedSample synthesize_sample(const SynthSpec& spec, std::size_t action, std::size_t subject,
                               std::size_t camera, std::size_t repetition, std::uint64_t seed);

/// Writes every (action, subject, camera, repetition) take under out_dir plus
/// out_dir/manifest.tsv; identical seeds give byte-identical files.
std::vector<SampleRecord> generate_synthetic_dataset(const SynthSpec& spec, std::uint64_t seed,
                                                     const std::filesystem::path& out_dir);

/// Reduced pipeline matching the synthetic scenes: 3 angles, windows {5, ALL},
/// RGB windows {10, 16}, 32x32 renders, desk networks, one pose.
PipelineConfig desk_pipeline_config(const SynthSpec& spec = {});

}  // namespace mvdmm
