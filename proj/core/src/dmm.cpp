#include "mvdmm/dmm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "mvdmm/error.hpp"

namespace mvdmm {

namespace {

void check_maps(std::span<const ProjectedMap> maps) {
  for (const auto& m : maps) {
    if (!m.grid.same_shape(maps.front().grid) || m.plane != maps.front().plane) {
      throw ContractError("projected maps must share plane and dimensions");
    }
  }
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

std::uint8_t quantize(double x) { return static_cast<std::uint8_t>(std::lround(255.0 * x)); }

DmmTemplate accumulate(std::span<const ProjectedMap> maps, std::span<const MagnitudeMap> weights,
                       std::size_t t, TemporalWindow window, const DmmOptions& options) {
  const auto n = effective_window(maps.size(), t, window);
  check_maps(maps);
  const auto& first = maps.front();
  DmmTemplate tpl{first.plane, window, first.angle_deg, t,
                  ScalarGrid(first.grid.width, first.grid.height)};
  auto& acc = tpl.grid.data;
  for (std::size_t k = t; k < t + n; ++k) {
    const auto& cur = maps[k].grid.data;
    const auto& next = maps[k + 1].grid.data;
    const double* g = weights.empty() ? nullptr : weights[k].g.data.data();
    for (std::size_t i = 0; i < acc.size(); ++i) {
      double d = std::abs(next[i] - cur[i]);
      if (d <= options.noise_floor) d = 0.0;
      acc[i] += g ? d * g[i] : d;
    }
  }
  return tpl;
}

}  // namespace

std::string TemporalWindow::to_string() const {
  return is_all() ? std::string("ALL") : std::to_string(frames);
}

TemporalWindow TemporalWindow::parse(std::string_view text) {
  if (text == "ALL" || text == "all" || text == "All") return all();
  std::size_t n = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc{} || end != text.data() + text.size() || n < 2) {
    throw ConfigError("window must be an integer >= 2 or ALL, got '" + std::string(text) + "'");
  }
  return of(n);
}

std::size_t effective_window(std::size_t map_count, std::size_t t, TemporalWindow window) {
  const std::size_t pairs = map_count == 0 ? 0 : map_count - 1;
  if (t >= pairs) {
    throw ContractError("template start " + std::to_string(t) + " beyond the " +
                        std::to_string(pairs) + " available frame pairs");
  }
  const std::size_t n = window.is_all() ? pairs - t : window.frames;
  if (t + n > pairs) {
    throw ContractError("window of " + std::to_string(n) + " pairs from t=" + std::to_string(t) +
                        " exceeds the " + std::to_string(pairs) + " available frame pairs (" +
                        std::to_string(map_count) + " frames)");
  }
  if (n < 2) {
    throw ContractError("effective window of " + std::to_string(n) + " pairs is below 2");
  }
  return n;
}

std::size_t template_count(std::size_t map_count, TemporalWindow window) {
  if (map_count < 3) return 0;
  const std::size_t pairs = map_count - 1;
  if (window.is_all()) return pairs - 1;
  return window.frames <= pairs ? pairs - window.frames + 1 : 0;
}

DmmTemplate accumulate_dmm(std::span<const ProjectedMap> maps, std::size_t t,
                           TemporalWindow window, const DmmOptions& options) {
  return accumulate(maps, {}, t, window, options);
}

DmmTemplate accumulate_ramdmm(std::span<const ProjectedMap> maps,
                              std::span<const MagnitudeMap> weights, std::size_t t,
                              TemporalWindow window, const DmmOptions& options) {
  if (weights.size() + 1 != maps.size()) {
    throw ContractError("expected " + std::to_string(maps.empty() ? 0 : maps.size() - 1) +
                        " motion weights (one per frame pair), got " +
                        std::to_string(weights.size()));
  }
  for (const auto& g : weights) {
    if (!maps.empty() && !g.g.same_shape(maps.front().grid)) {
      throw ContractError("motion weights differ in shape from the projected maps");
    }
  }
  return accumulate(maps, weights, t, window, options);
}

std::vector<DmmTemplate> template_stream(std::span<const ProjectedMap> maps,
                                         std::span<const MagnitudeMap> weights,
                                         TemporalWindow window, const DmmOptions& options) {
  const auto count = template_count(maps.size(), window);
  std::vector<DmmTemplate> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    out.push_back(weights.empty() ? accumulate_dmm(maps, t, window, options)
                                  : accumulate_ramdmm(maps, weights, t, window, options));
  }
  return out;
}

Rgb jet(double u) {
  u = clamp01(u);
  return {quantize(clamp01(1.5 - std::abs(4.0 * u - 3.0))),
          quantize(clamp01(1.5 - std::abs(4.0 * u - 2.0))),
          quantize(clamp01(1.5 - std::abs(4.0 * u - 1.0)))};
}

ColorImage colorize(const ScalarGrid& grid) {
  ColorImage out(grid.width, grid.height);
  if (grid.empty()) return out;
  const auto [lo, hi] = std::minmax_element(grid.data.begin(), grid.data.end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double u = range > 0.0 ? (grid.data[i] - min) / range : 0.0;
    // Snap to 2^-20 steps so a rescaled grid (one-ulp different ratios) renders identically.
    u = std::round(u * 0x1.0p20) * 0x1.0p-20;
    out.data[i] = jet(u);
  }
  return out;
}

ColorImage fit_to_canvas(const ColorImage& image, std::size_t out_h, std::size_t out_w) {
  if (image.empty()) throw ContractError("fit_to_canvas: empty image");
  const double sx = static_cast<double>(out_w) / static_cast<double>(image.width);
  const double sy = static_cast<double>(out_h) / static_cast<double>(image.height);
  const double s = std::min(sx, sy);
  const auto w = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(static_cast<double>(image.width) * s)), 1, out_w);
  const auto h = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(static_cast<double>(image.height) * s)), 1, out_h);
  const std::size_t ox = (out_w - w) / 2;
  const std::size_t oy = (out_h - h) / 2;

  ColorImage out(out_w, out_h);
  const double fx = static_cast<double>(image.width) / static_cast<double>(w);
  const double fy = static_cast<double>(image.height) / static_cast<double>(h);
  const double max_x = static_cast<double>(image.width - 1);
  const double max_y = static_cast<double>(image.height - 1);
  for (std::size_t y = 0; y < h; ++y) {
    const double srcy = std::clamp((static_cast<double>(y) + 0.5) * fy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(srcy);
    const auto y1 = std::min(y0 + 1, image.height - 1);
    const double ty = srcy - static_cast<double>(y0);
    for (std::size_t x = 0; x < w; ++x) {
      const double srcx = std::clamp((static_cast<double>(x) + 0.5) * fx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(srcx);
      const auto x1 = std::min(x0 + 1, image.width - 1);
      const double tx = srcx - static_cast<double>(x0);
      auto lerp = [&](auto channel) {
        const double top = (1.0 - tx) * channel(image(x0, y0)) + tx * channel(image(x1, y0));
        const double bottom = (1.0 - tx) * channel(image(x0, y1)) + tx * channel(image(x1, y1));
        return static_cast<std::uint8_t>(std::lround((1.0 - ty) * top + ty * bottom));
      };
      out(ox + x, oy + y) = {lerp([](const Rgb& p) { return double(p.r); }),
                             lerp([](const Rgb& p) { return double(p.g); }),
                             lerp([](const Rgb& p) { return double(p.b); })};
    }
  }
  return out;
}

ColorImage render_template(const DmmTemplate& tpl, std::size_t out_h, std::size_t out_w) {
  if (out_h < 8 || out_w < 8) throw ContractError("render size must be at least 8x8");
  return fit_to_canvas(colorize(tpl.grid), out_h, out_w);
}

Clip stack_clip(std::span<const ColorImage> rendered, std::size_t t, std::size_t lambda) {
  if (lambda == 0) throw ContractError("clip length must be at least 1");
  if (t >= rendered.size() || t + 1 < lambda) {
    throw ContractError("clip of " + std::to_string(lambda) + " frames ending at t=" +
                        std::to_string(t) + " needs more history than the " +
                        std::to_string(rendered.size()) + " available images");
  }
  Clip clip;
  clip.frames.assign(rendered.begin() + static_cast<std::ptrdiff_t>(t + 1 - lambda),
                     rendered.begin() + static_cast<std::ptrdiff_t>(t + 1));
  for (const auto& f : clip.frames) {
    if (!f.same_shape(clip.frames.front())) throw ContractError("clip frames differ in size");
  }
  return clip;
}

std::vector<std::size_t> clip_ends(std::size_t count, std::size_t lambda) {
  std::vector<std::size_t> ends;
  if (lambda == 0) return ends;
  for (std::size_t end = lambda - 1; end < count; end += lambda) ends.push_back(end);
  return ends;
}

}  // namespace mvdmm
