#include "mvdmm/motion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvdmm/error.hpp"

namespace mvdmm {

namespace {

std::vector<std::size_t> clamped(std::size_t n, int offset) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long j = static_cast<long>(i) + offset;
    idx[i] = static_cast<std::size_t>(std::clamp(j, 0L, static_cast<long>(n) - 1));
  }
  return idx;
}

double max_abs(const ScalarGrid& g) {
  double m = 0.0;
  for (double v : g.data) m = std::max(m, std::abs(v));
  return m;
}

float to_single(double v) { return static_cast<float>(v); }

}  // namespace

FlowField estimate_flow(const ScalarGrid& a, const ScalarGrid& b, const FlowParams& params) {
  if (!a.same_shape(b)) throw ContractError("estimate_flow: frame dimensions differ");
  if (a.width < 2 || a.height < 2) throw ContractError("estimate_flow: frames must be at least 2x2");
  const auto w = a.width;
  const auto h = a.height;

  const double scale = std::max(max_abs(a), max_abs(b));
  FlowField flow{ScalarGrid(w, h), ScalarGrid(w, h)};
  if (scale == 0.0) return flow;
  const double inv = 1.0 / scale;

  const auto xm = clamped(w, -1), xp = clamped(w, 1);
  const auto ym = clamped(h, -1), yp = clamped(h, 1);

  ScalarGrid ix(w, h), iy(w, h), it(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double dxa = a(xp[x], y) - a(xm[x], y);
      const double dxb = b(xp[x], y) - b(xm[x], y);
      const double dya = a(x, yp[y]) - a(x, ym[y]);
      const double dyb = b(x, yp[y]) - b(x, ym[y]);
      ix(x, y) = 0.25 * (dxa + dxb) * inv;
      iy(x, y) = 0.25 * (dya + dyb) * inv;
      it(x, y) = (b(x, y) - a(x, y)) * inv;
    }
  }

  ScalarGrid u(w, h), v(w, h), un(w, h), vn(w, h);
  auto average = [&](const ScalarGrid& f, std::size_t x, std::size_t y) {
    const double edges = f(xm[x], y) + f(xp[x], y) + f(x, ym[y]) + f(x, yp[y]);
    const double corners =
        f(xm[x], ym[y]) + f(xp[x], ym[y]) + f(xm[x], yp[y]) + f(xp[x], yp[y]);
    return edges / 6.0 + corners / 12.0;
  };
  for (int iter = 0; iter < params.iterations; ++iter) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double ubar = average(u, x, y);
        const double vbar = average(v, x, y);
        const double gx = ix(x, y);
        const double gy = iy(x, y);
        const double k = (gx * ubar + gy * vbar + it(x, y)) / (params.smoothness + gx * gx + gy * gy);
        un(x, y) = ubar - gx * k;
        vn(x, y) = vbar - gy * k;
      }
    }
    std::swap(u, un);
    std::swap(v, vn);
  }
  flow.ox = std::move(u);
  flow.oy = std::move(v);
  return flow;
}

MagnitudeMap flow_magnitude(const FlowField& flow) {
  if (!flow.ox.same_shape(flow.oy)) throw ContractError("flow components differ in shape");
  MagnitudeMap m{ScalarGrid(flow.ox.width, flow.ox.height), false};
  for (std::size_t i = 0; i < m.g.size(); ++i) {
    m.g.data[i] = flow.ox.data[i] * flow.ox.data[i] + flow.oy.data[i] * flow.oy.data[i];
  }
  return m;
}

MagnitudeMap normalize_magnitude(const MagnitudeMap& m, double eps) {
  MagnitudeMap out{ScalarGrid(m.g.width, m.g.height), true};
  double peak = 0.0;
  for (double v : m.g.data) peak = std::max(peak, v);
  if (peak < eps) return out;
  for (std::size_t i = 0; i < m.g.size(); ++i) out.g.data[i] = to_single(m.g.data[i] / peak);
  return out;
}

std::vector<MagnitudeMap> normalize_sequence(std::span<const MagnitudeMap> maps, double eps) {
  double peak = 0.0;
  for (const auto& m : maps) {
    for (double v : m.g.data) peak = std::max(peak, v);
  }
  std::vector<MagnitudeMap> out;
  out.reserve(maps.size());
  for (const auto& m : maps) {
    MagnitudeMap n{ScalarGrid(m.g.width, m.g.height), true};
    if (peak >= eps) {
      for (std::size_t i = 0; i < m.g.size(); ++i) n.g.data[i] = to_single(m.g.data[i] / peak);
    }
    out.push_back(std::move(n));
  }
  return out;
}

Normalization parse_normalization(std::string_view text) {
  if (text == "per_pair" || text == "pair") return Normalization::per_pair;
  if (text == "per_sequence" || text == "sequence") return Normalization::per_sequence;
  throw ConfigError("unknown flow normalization '" + std::string(text) + "'");
}

std::string_view to_string(Normalization n) {
  return n == Normalization::per_pair ? "per_pair" : "per_sequence";
}

std::vector<MagnitudeMap> motion_weights(std::span<const ScalarGrid> maps, const FlowParams& params,
                                         Normalization mode) {
  if (maps.size() < 2) throw ContractError("motion weights need at least two frames");
  std::vector<MagnitudeMap> raw;
  raw.reserve(maps.size() - 1);
  for (std::size_t k = 0; k + 1 < maps.size(); ++k) {
    raw.push_back(flow_magnitude(estimate_flow(maps[k], maps[k + 1], params)));
  }
  if (mode == Normalization::per_sequence) return normalize_sequence(raw);
  std::vector<MagnitudeMap> out;
  out.reserve(raw.size());
  for (const auto& m : raw) out.push_back(normalize_magnitude(m));
  return out;
}

}  // namespace mvdmm
