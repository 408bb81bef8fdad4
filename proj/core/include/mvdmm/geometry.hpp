#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "mvdmm/grid.hpp"
#include "mvdmm/videoio.hpp"

namespace mvdmm {

/// Camera-centered, right-handed coordinates in millimeters: x right, y down, z forward.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

struct PointCloud {
  std::vector<Point3> points;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// Pinhole model with square pixels.
struct Intrinsics {
  double focal = 285.63;
  double cx = 159.5;
  double cy = 119.5;

  /// Kinect-v1 scale: f = 285.63 px at 320 px width, scaled with width; center principal point.
  static Intrinsics for_frame(std::size_t width, std::size_t height);
};

/// Yaw `alpha` about the vertical axis, then pitch `beta` about the horizontal axis (degrees).
struct RotationSpec {
  double alpha_deg = 0.0;
  double beta_deg = 0.0;
};

using Mat3 = std::array<double, 9>;

/// Row-major R = R_pitch(beta) * R_yaw(alpha). Throws ContractError for angles outside [-180, 180].
Mat3 rotation_matrix(const RotationSpec& spec);

/// Back-projects each nonzero pixel: x = (u - cx) z / f, y = (v - cy) z / f.
PointCloud depth_to_points(const DepthFrame& frame, const Intrinsics& intrinsics);

PointCloud rotate_points(const PointCloud& cloud, const RotationSpec& spec);
/// Rotation about `pivot` instead of the camera center: p' = R (p - pivot) + pivot.
PointCloud rotate_points_about(const PointCloud& cloud, const RotationSpec& spec,
                               const Point3& pivot);

struct ReprojectOptions {
  bool fill_holes = true;
};

/// Forward projection with a z-buffer (nearest surface wins); unhit pixels are 0.
DepthFrame points_to_depth(const PointCloud& cloud, const Intrinsics& intrinsics,
                           std::size_t width, std::size_t height, ReprojectOptions options = {});

/// One 3x3 median pass over zero pixels that have at least five nonzero neighbors.
DepthFrame fill_holes(const DepthFrame& frame);

/// Lift, rotate about `pivot`, reproject at the source resolution.
DepthFrame synthesize_view(const DepthFrame& frame, const Intrinsics& intrinsics,
                           const RotationSpec& spec, const Point3& pivot,
                           ReprojectOptions options = {});

enum class Plane { xy, yz, xz };

inline constexpr std::array<Plane, 3> kAllPlanes{Plane::xy, Plane::yz, Plane::xz};

std::string_view to_string(Plane plane);
Plane parse_plane(std::string_view text);

/// Depth-axis quantization for the side (yz) and top (xz) occupancy maps.
struct BinParams {
  double bin_size_mm = 10.0;
  std::size_t bin_count = 400;
  double origin_mm = 0.0;

  /// Bin of a depth value, or -1 when it falls outside the binned range.
  [[nodiscard]] long bin_of(double depth_mm) const;

  friend bool operator==(const BinParams&, const BinParams&) = default;
};

struct ProjectedMap {
  Plane plane = Plane::xy;
  ScalarGrid grid;
  BinParams bins;
  double angle_deg = 0.0;
};

/// Front (xy) map is the depth image itself; side map m_yz is indexed (zbin, y)
/// with width = bin_count; top map m_xz is indexed (x, zbin) with height = bin_count.
std::array<ProjectedMap, 3> project_cartesian(const DepthFrame& frame, const BinParams& bins,
                                              double angle_deg = 0.0);

}  // namespace mvdmm
