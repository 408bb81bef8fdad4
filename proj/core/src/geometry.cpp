#include "mvdmm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mvdmm/error.hpp"

namespace mvdmm {

namespace {

// Exact values on the axes so quarter turns do not leak 6e-17 residues.
void sin_cos_deg(double deg, double& s, double& c) {
  const double quarter = deg / 90.0;
  if (quarter == std::floor(quarter)) {
    static constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
    static constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
    const auto k = static_cast<int>(((static_cast<long>(quarter) % 4) + 4) % 4);
    s = kSin[k];
    c = kCos[k];
    return;
  }
  const double rad = deg * std::numbers::pi / 180.0;
  s = std::sin(rad);
  c = std::cos(rad);
}

Point3 apply(const Mat3& r, const Point3& p) {
  return {r[0] * p.x + r[1] * p.y + r[2] * p.z,
          r[3] * p.x + r[4] * p.y + r[5] * p.z,
          r[6] * p.x + r[7] * p.y + r[8] * p.z};
}

}  // namespace

Intrinsics Intrinsics::for_frame(std::size_t width, std::size_t height) {
  return {285.63 * static_cast<double>(width) / 320.0, (static_cast<double>(width) - 1.0) / 2.0,
          (static_cast<double>(height) - 1.0) / 2.0};
}

Mat3 rotation_matrix(const RotationSpec& spec) {
  if (!(std::abs(spec.alpha_deg) <= 180.0) || !(std::abs(spec.beta_deg) <= 180.0)) {
    throw ContractError("rotation angles must lie in [-180, 180] degrees");
  }
  double sa, ca, sb, cb;
  sin_cos_deg(spec.alpha_deg, sa, ca);
  sin_cos_deg(spec.beta_deg, sb, cb);
  // yaw = [[ca,0,sa],[0,1,0],[-sa,0,ca]], pitch = [[1,0,0],[0,cb,-sb],[0,sb,cb]]
  return {ca,       0.0, sa,        //
          sb * sa,  cb,  -sb * ca,  //
          -cb * sa, sb,  cb * ca};
}

PointCloud depth_to_points(const DepthFrame& frame, const Intrinsics& k) {
  if (!(k.focal > 0.0)) throw ContractError("focal length must be positive");
  PointCloud cloud;
  for (std::size_t v = 0; v < frame.height(); ++v) {
    for (std::size_t u = 0; u < frame.width(); ++u) {
      const auto d = frame.depth(u, v);
      if (d == 0) continue;
      const double z = d;
      cloud.points.push_back({(static_cast<double>(u) - k.cx) * z / k.focal,
                              (static_cast<double>(v) - k.cy) * z / k.focal, z});
    }
  }
  return cloud;
}

PointCloud rotate_points(const PointCloud& cloud, const RotationSpec& spec) {
  return rotate_points_about(cloud, spec, Point3{});
}

PointCloud rotate_points_about(const PointCloud& cloud, const RotationSpec& spec,
                               const Point3& pivot) {
  const auto r = rotation_matrix(spec);
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    const auto q = apply(r, {p.x - pivot.x, p.y - pivot.y, p.z - pivot.z});
    out.points.push_back({q.x + pivot.x, q.y + pivot.y, q.z + pivot.z});
  }
  return out;
}

DepthFrame points_to_depth(const PointCloud& cloud, const Intrinsics& k, std::size_t width,
                           std::size_t height, ReprojectOptions options) {
  if (width == 0 || height == 0) throw ContractError("output dimensions must be at least 1x1");
  if (!(k.focal > 0.0)) throw ContractError("focal length must be positive");
  constexpr auto kEmpty = std::numeric_limits<double>::infinity();
  Grid<double> zbuf(width, height, kEmpty);
  for (const auto& p : cloud.points) {
    if (!(p.z >= 0.5)) continue;  // rounds to a 0 ("no reading") depth
    const double u = std::round(k.focal * p.x / p.z + k.cx);
    const double v = std::round(k.focal * p.y / p.z + k.cy);
    if (!(u >= 0.0 && v >= 0.0 && u < static_cast<double>(width) &&
          v < static_cast<double>(height))) {
      continue;
    }
    auto& cell = zbuf(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    cell = std::min(cell, p.z);
  }

  DepthFrame frame{Grid<std::uint32_t>(width, height), 0};
  for (std::size_t i = 0; i < zbuf.size(); ++i) {
    const double z = zbuf.data[i];
    if (z == kEmpty) continue;
    frame.depth.data[i] = static_cast<std::uint32_t>(
        std::min(std::round(z), static_cast<double>(std::numeric_limits<std::uint32_t>::max())));
  }
  return options.fill_holes ? fill_holes(frame) : frame;
}

DepthFrame fill_holes(const DepthFrame& frame) {
  DepthFrame out = frame;
  const auto w = frame.width();
  const auto h = frame.height();
  std::uint32_t neighbors[8];
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (frame.depth(x, y) != 0) continue;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const auto nx = static_cast<long>(x) + dx;
          const auto ny = static_cast<long>(y) + dy;
          if (nx < 0 || ny < 0 || nx >= static_cast<long>(w) || ny >= static_cast<long>(h)) {
            continue;
          }
          const auto d = frame.depth(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
          if (d != 0) neighbors[n++] = d;
        }
      }
      if (n < 5) continue;
      // lower median of the nonzero neighbors
      auto* mid = neighbors + (n - 1) / 2;
      std::nth_element(neighbors, mid, neighbors + n);
      out.depth(x, y) = *mid;
    }
  }
  return out;
}

DepthFrame synthesize_view(const DepthFrame& frame, const Intrinsics& k, const RotationSpec& spec,
                           const Point3& pivot, ReprojectOptions options) {
  auto cloud = rotate_points_about(depth_to_points(frame, k), spec, pivot);
  auto out = points_to_depth(cloud, k, frame.width(), frame.height(), options);
  out.index = frame.index;
  return out;
}

std::string_view to_string(Plane plane) {
  switch (plane) {
    case Plane::xy:
      return "xy";
    case Plane::yz:
      return "yz";
    case Plane::xz:
      return "xz";
  }
  return "?";
}

Plane parse_plane(std::string_view text) {
  if (text == "xy") return Plane::xy;
  if (text == "yz") return Plane::yz;
  if (text == "xz") return Plane::xz;
  throw ConfigError("unknown projection plane '" + std::string(text) + "'");
}

long BinParams::bin_of(double depth_mm) const {
  const double b = std::floor((depth_mm - origin_mm) / bin_size_mm);
  if (!(b >= 0.0) || b >= static_cast<double>(bin_count)) return -1;
  return static_cast<long>(b);
}

std::array<ProjectedMap, 3> project_cartesian(const DepthFrame& frame, const BinParams& bins,
                                              double angle_deg) {
  if (bins.bin_count < 1) throw ContractError("bin count must be at least 1");
  if (!(bins.bin_size_mm > 0.0)) throw ContractError("bin size must be positive");
  const auto w = frame.width();
  const auto h = frame.height();

  ProjectedMap front{Plane::xy, ScalarGrid(w, h), bins, angle_deg};
  ProjectedMap side{Plane::yz, ScalarGrid(bins.bin_count, h), bins, angle_deg};
  ProjectedMap top{Plane::xz, ScalarGrid(w, bins.bin_count), bins, angle_deg};

  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto d = frame.depth(x, y);
      front.grid(x, y) = d;
      if (d == 0) continue;
      const long b = bins.bin_of(d);
      if (b < 0) continue;
      side.grid(static_cast<std::size_t>(b), y) = 1.0;
      top.grid(x, static_cast<std::size_t>(b)) = 1.0;
    }
  }
  return {std::move(front), std::move(side), std::move(top)};
}

}  // namespace mvdmm
