#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvdmm/geometry.hpp"
#include "mvdmm/grid.hpp"
#include "mvdmm/motion.hpp"

namespace mvdmm {

/// Accumulation window length in frame pairs; `all()` runs from the start index to the end.
struct TemporalWindow {
  std::size_t frames = 0;  // 0 encodes ALL

  static constexpr TemporalWindow all() { return {0}; }
  static constexpr TemporalWindow of(std::size_t n) { return {n}; }
  [[nodiscard]] constexpr bool is_all() const { return frames == 0; }

  [[nodiscard]] std::string to_string() const;
  static TemporalWindow parse(std::string_view text);

  friend bool operator==(const TemporalWindow&, const TemporalWindow&) = default;
  friend auto operator<=>(const TemporalWindow&, const TemporalWindow&) = default;
};

struct DmmTemplate {
  Plane plane = Plane::xy;
  TemporalWindow window;
  double angle_deg = 0.0;
  std::size_t start = 0;
  ScalarGrid grid;
};

struct DmmOptions {
  /// Per-pixel frame differences at or below this value are treated as zero.
  double noise_floor = 0.0;
};

/// Number of frame pairs covered by a template starting at `t`. A sequence of
/// n maps has n-1 pairs; throws ContractError if the window does not fit or
/// covers fewer than two pairs.
std::size_t effective_window(std::size_t map_count, std::size_t t, TemporalWindow window);

/// Number of valid start indices for `window` over `map_count` maps.
std::size_t template_count(std::size_t map_count, TemporalWindow window);

/// Sum over t' in [t, t+w) of |m[t'+1] - m[t']|.
DmmTemplate accumulate_dmm(std::span<const ProjectedMap> maps, std::size_t t,
                           TemporalWindow window, const DmmOptions& options = {});

/// Sum over t' in [t, t+w) of |m[t'+1] - m[t']| * g[t'], where weights[k] is the
/// normalized motion magnitude of pair (k, k+1).
DmmTemplate accumulate_ramdmm(std::span<const ProjectedMap> maps,
                              std::span<const MagnitudeMap> weights, std::size_t t,
                              TemporalWindow window, const DmmOptions& options = {});

/// Templates for every valid start index, weighted when `weights` is non-empty.
std::vector<DmmTemplate> template_stream(std::span<const ProjectedMap> maps,
                                         std::span<const MagnitudeMap> weights,
                                         TemporalWindow window, const DmmOptions& options = {});

/// Jet palette: r = clamp(1.5 - |4u - 3|), g = clamp(1.5 - |4u - 2|),
/// b = clamp(1.5 - |4u - 1|), each quantized as round(255 x).
Rgb jet(double u);

/// Min-max scales a grid into [0, 1] (constant grids map to 0) and applies jet.
ColorImage colorize(const ScalarGrid& grid);

/// Aspect-preserving bilinear resize into out_w x out_h, centered with black padding.
ColorImage fit_to_canvas(const ColorImage& image, std::size_t out_h, std::size_t out_w);

/// colorize + fit_to_canvas; out_size must be at least 8x8.
ColorImage render_template(const DmmTemplate& tpl, std::size_t out_h, std::size_t out_w);

struct Clip {
  std::vector<ColorImage> frames;

  [[nodiscard]] std::size_t lambda() const { return frames.size(); }
};

/// The `lambda` most recent images ending at index t, oldest first.
Clip stack_clip(std::span<const ColorImage> rendered, std::size_t t, std::size_t lambda);

/// End indices of clips tiling a stream of `count` images with stride lambda.
std::vector<std::size_t> clip_ends(std::size_t count, std::size_t lambda);

}  // namespace mvdmm
