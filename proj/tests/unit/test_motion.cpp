#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mvdmm/error.hpp"
#include "mvdmm/motion.hpp"
#include "mvdmm/random.hpp"

using namespace mvdmm;

namespace {

// Smooth random texture on a square, zero elsewhere, shifted right by dx pixels.
ScalarGrid textured_square(std::size_t side, std::size_t x0, std::size_t y0, std::size_t size,
                           double dx) {
  ScalarGrid g(side, side);
  for (std::size_t y = y0; y < y0 + size; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      const double u = static_cast<double>(x) - dx - static_cast<double>(x0);
      if (u < 0 || u > static_cast<double>(size - 1)) continue;
      g(x, y) = 0.5 + 0.25 * std::sin(0.9 * u) + 0.2 * std::cos(0.7 * static_cast<double>(y) + 0.4 * u);
    }
  }
  return g;
}

ScalarGrid mirror(const ScalarGrid& g) {
  ScalarGrid out(g.width, g.height);
  for (std::size_t y = 0; y < g.height; ++y)
    for (std::size_t x = 0; x < g.width; ++x) out(g.width - 1 - x, y) = g(x, y);
  return out;
}

double max_abs(const ScalarGrid& g) {
  double m = 0;
  for (double v : g.data) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

TEST(Flow, IdenticalFramesGiveZeroFlow) {
  Engine rng(2);
  ScalarGrid a(24, 20);
  for (auto& v : a.data) v = uniform(rng, 0, 1000);
  const auto f = estimate_flow(a, a);
  EXPECT_LT(max_abs(f.ox), 1e-6);
  EXPECT_LT(max_abs(f.oy), 1e-6);
}

TEST(Flow, TexturelessFramesGiveZeroFlow) {
  const ScalarGrid a(16, 16, 3.0);
  const auto f = estimate_flow(a, a);
  EXPECT_LT(max_abs(f.ox), 1e-6);
}

TEST(Flow, TranslatedSquare) {
  const auto a = textured_square(48, 14, 14, 20, 0.0);
  const auto b = textured_square(48, 14, 14, 20, 1.0);
  const auto f = estimate_flow(a, b);
  double sx = 0, sy = 0;
  std::size_t n = 0;
  for (std::size_t y = 14; y < 34; ++y)
    for (std::size_t x = 14; x < 34; ++x) {
      sx += f.ox(x, y);
      sy += f.oy(x, y);
      ++n;
    }
  EXPECT_GE(sx / n, 0.8);
  EXPECT_LE(sx / n, 1.2);
  EXPECT_GE(sy / n, -0.2);
  EXPECT_LE(sy / n, 0.2);
}

TEST(Flow, MirrorSymmetry) {
  const auto a = textured_square(40, 10, 12, 16, 0.0);
  const auto b = textured_square(40, 10, 12, 16, 1.0);
  const auto f = estimate_flow(a, b);
  const auto m = estimate_flow(mirror(a), mirror(b));
  const auto mox = mirror(m.ox);
  const auto moy = mirror(m.oy);
  for (std::size_t i = 0; i < f.ox.size(); ++i) {
    EXPECT_NEAR(mox.data[i], -f.ox.data[i], 1e-3);
    EXPECT_NEAR(moy.data[i], f.oy.data[i], 1e-3);
  }
}

TEST(Flow, DimensionMismatch) {
  EXPECT_THROW(estimate_flow(ScalarGrid(4, 4), ScalarGrid(4, 5)), ContractError);
  EXPECT_THROW(estimate_flow(ScalarGrid(1, 4), ScalarGrid(1, 4)), ContractError);
}

TEST(Magnitude, SquaredNoRoot) {
  FlowField f{ScalarGrid(2, 1), ScalarGrid(2, 1)};
  f.ox(1, 0) = 3;
  f.oy(1, 0) = 4;
  const auto m = flow_magnitude(f);
  EXPECT_EQ(m.g(0, 0), 0.0);
  EXPECT_EQ(m.g(1, 0), 25.0);
  EXPECT_FALSE(m.normalized);
  const auto unit = flow_magnitude({ScalarGrid(3, 3, 1.0), ScalarGrid(3, 3, 0.0)});
  for (double v : unit.g.data) EXPECT_EQ(v, 1.0);
}

TEST(Normalize, Examples) {
  MagnitudeMap m{ScalarGrid(2, 1), false};
  m.g.data = {1, 4};
  const auto n = normalize_magnitude(m);
  EXPECT_EQ(n.g.data, (std::vector<double>{0.25, 1.0}));
  EXPECT_TRUE(n.normalized);
  const auto z = normalize_magnitude({ScalarGrid(3, 2), false});
  for (double v : z.g.data) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(normalize_magnitude(n).g, n.g);
}

TEST(Normalize, IdempotentAndScaleInvariant) {
  Engine rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    MagnitudeMap m{ScalarGrid(9, 7), false};
    for (auto& v : m.g.data) v = uniform(rng, 0, 50);
    const auto n = normalize_magnitude(m);
    EXPECT_EQ(normalize_magnitude(n).g, n.g);
    for (double k : {1e-3, 0.37, 7.3, 1234.5}) {
      MagnitudeMap s = m;
      for (auto& v : s.g.data) v *= k;
      EXPECT_EQ(normalize_magnitude(s).g, n.g);
    }
    for (double v : n.g.data) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Normalize, PerSequenceUsesGlobalMax) {
  std::vector<MagnitudeMap> maps(2, {ScalarGrid(1, 1), false});
  maps[0].g(0, 0) = 2;
  maps[1].g(0, 0) = 8;
  const auto n = normalize_sequence(maps);
  EXPECT_EQ(n[0].g(0, 0), 0.25);
  EXPECT_EQ(n[1].g(0, 0), 1.0);
  EXPECT_EQ(parse_normalization(to_string(Normalization::per_sequence)), Normalization::per_sequence);
}

TEST(MotionWeights, OnePerPair) {
  std::vector<ScalarGrid> maps;
  for (int i = 0; i < 4; ++i) maps.push_back(textured_square(24, 4, 4, 12, 0.5 * i));
  const auto w = motion_weights(maps);
  ASSERT_EQ(w.size(), 3u);
  for (const auto& m : w) {
    EXPECT_TRUE(m.normalized);
    EXPECT_EQ(*std::max_element(m.g.data.begin(), m.g.data.end()), 1.0);
  }
}
