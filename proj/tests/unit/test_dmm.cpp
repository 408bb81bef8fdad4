#include <gtest/gtest.h>

#include <algorithm>

#include "mvdmm/dmm.hpp"
#include "mvdmm/error.hpp"
#include "oracles.hpp"

using namespace mvdmm;

namespace {

std::vector<ProjectedMap> scalar_maps(std::initializer_list<double> values) {
  std::vector<ProjectedMap> maps;
  for (double v : values) {
    ProjectedMap m;
    m.grid = ScalarGrid(1, 1, v);
    maps.push_back(m);
  }
  return maps;
}

std::vector<MagnitudeMap> weights_of(std::initializer_list<double> values) {
  std::vector<MagnitudeMap> out;
  for (double v : values) out.push_back({ScalarGrid(1, 1, v), true});
  return out;
}

std::vector<MagnitudeMap> random_weights(std::size_t n, std::size_t w, std::size_t h, Engine& rng) {
  std::vector<MagnitudeMap> out(n, {ScalarGrid(w, h), true});
  for (auto& m : out)
    for (auto& v : m.g.data) v = uniform01(rng);
  return out;
}

ColorImage tagged(std::uint8_t tag) { return ColorImage(2, 2, Rgb{tag, 0, 0}); }

}  // namespace

TEST(Accumulate, Arithmetic) {
  const auto maps = scalar_maps({0, 3, 5});
  EXPECT_EQ(accumulate_dmm(maps, 0, TemporalWindow::of(2)).grid(0, 0), 5.0);
  EXPECT_EQ(accumulate_dmm(maps, 0, TemporalWindow::all()).grid(0, 0), 5.0);
  EXPECT_EQ(accumulate_ramdmm(maps, weights_of({0.5, 1.0}), 0, TemporalWindow::of(2)).grid(0, 0),
            3.5);
}

TEST(Accumulate, StaticSequenceIsZero) {
  std::vector<ProjectedMap> maps(8);
  for (auto& m : maps) m.grid = ScalarGrid(5, 4, 1234.0);
  for (auto w : {TemporalWindow::of(2), TemporalWindow::of(5), TemporalWindow::all()}) {
    for (const auto& t : template_stream(maps, {}, w)) {
      for (double v : t.grid.data) EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(Accumulate, MatchesNaiveSum) {
  Engine rng(30);
  const auto maps = oracle::random_maps(12, 7, 5, rng);
  const auto g = random_weights(11, 7, 5, rng);
  for (std::size_t t = 0; t + 2 <= 11; ++t) {
    for (std::size_t n = 2; t + n <= 11; ++n) {
      EXPECT_EQ(accumulate_dmm(maps, t, TemporalWindow::of(n)).grid, oracle::dmm_sum(maps, t, n));
      EXPECT_EQ(accumulate_ramdmm(maps, g, t, TemporalWindow::of(n)).grid,
                oracle::dmm_sum(maps, t, n, g));
    }
  }
}

TEST(Accumulate, TelescopingSplit) {
  Engine rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto maps = oracle::random_maps(20, 6, 4, rng);
    const auto a = 2 + uniform_index(rng, 8);
    const auto b = 2 + uniform_index(rng, 19 - a - 1);
    const auto left = accumulate_dmm(maps, 0, TemporalWindow::of(a));
    const auto right = accumulate_dmm(maps, a, TemporalWindow::of(b));
    const auto whole = accumulate_dmm(maps, 0, TemporalWindow::of(a + b));
    for (std::size_t i = 0; i < whole.grid.size(); ++i) {
      EXPECT_EQ(left.grid.data[i] + right.grid.data[i], whole.grid.data[i]);
    }
  }
}

TEST(Accumulate, UnitAndZeroWeights) {
  Engine rng(32);
  const auto maps = oracle::random_maps(9, 5, 5, rng);
  std::vector<MagnitudeMap> ones(8, {ScalarGrid(5, 5, 1.0), true});
  std::vector<MagnitudeMap> zeros(8, {ScalarGrid(5, 5, 0.0), true});
  EXPECT_EQ(accumulate_ramdmm(maps, ones, 1, TemporalWindow::of(6)).grid,
            accumulate_dmm(maps, 1, TemporalWindow::of(6)).grid);
  for (double v : accumulate_ramdmm(maps, zeros, 0, TemporalWindow::all()).grid.data) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(Accumulate, WeightedNeverExceedsPlain) {
  Engine rng(33);
  const auto maps = oracle::random_maps(10, 6, 6, rng);
  const auto g = random_weights(9, 6, 6, rng);
  const auto w = accumulate_ramdmm(maps, g, 0, TemporalWindow::all());
  const auto p = accumulate_dmm(maps, 0, TemporalWindow::all());
  for (std::size_t i = 0; i < p.grid.size(); ++i) EXPECT_LE(w.grid.data[i], p.grid.data[i]);
}

TEST(Accumulate, WindowErrors) {
  const auto maps = scalar_maps({0, 1, 2, 3});
  EXPECT_THROW(accumulate_dmm(maps, 0, TemporalWindow::of(4)), ContractError);
  EXPECT_THROW(accumulate_dmm(maps, 2, TemporalWindow::all()), ContractError);
  try {
    accumulate_dmm(maps, 1, TemporalWindow::of(5));
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find('4'), std::string::npos) << e.what();
  }
  EXPECT_THROW(accumulate_ramdmm(maps, weights_of({1, 1}), 0, TemporalWindow::of(3)), ContractError);
}

TEST(Accumulate, NoiseFloor) {
  const auto maps = scalar_maps({0, 2, 10});
  EXPECT_EQ(accumulate_dmm(maps, 0, TemporalWindow::of(2), {3.0}).grid(0, 0), 8.0);
}

TEST(Window, CountsAndText) {
  EXPECT_EQ(effective_window(10, 0, TemporalWindow::all()), 9u);
  EXPECT_EQ(effective_window(10, 3, TemporalWindow::of(5)), 5u);
  EXPECT_EQ(template_count(10, TemporalWindow::of(5)), 5u);
  EXPECT_EQ(template_count(10, TemporalWindow::all()), 8u);
  EXPECT_EQ(TemporalWindow::parse("ALL"), TemporalWindow::all());
  EXPECT_EQ(TemporalWindow::parse("10"), TemporalWindow::of(10));
  EXPECT_EQ(TemporalWindow::of(5).to_string(), "5");
  EXPECT_EQ(TemporalWindow::all().to_string(), "ALL");
}

TEST(Jet, EndpointsAndFormula) {
  EXPECT_EQ(jet(0.0), (Rgb{0, 0, 128}));
  EXPECT_EQ(jet(1.0), (Rgb{128, 0, 0}));
  EXPECT_EQ(jet(0.5), (Rgb{128, 255, 128}));
  for (int i = 0; i <= 1000; ++i) {
    const double u = i / 1000.0;
    auto q = [](double x) { return static_cast<std::uint8_t>(std::lround(255 * std::clamp(x, 0.0, 1.0))); };
    const Rgb want{q(1.5 - std::fabs(4 * u - 3)), q(1.5 - std::fabs(4 * u - 2)), q(1.5 - std::fabs(4 * u - 1))};
    EXPECT_EQ(jet(u), want) << u;
  }
}

TEST(Render, ZeroTemplateIsSolidDarkBlue) {
  DmmTemplate t;
  t.grid = ScalarGrid(10, 10);
  const auto img = render_template(t, 16, 16);
  for (const auto& p : img.data) EXPECT_EQ(p, jet(0.0));
}

TEST(Render, MaxValueIsTopOfPalette) {
  DmmTemplate t;
  t.grid = ScalarGrid(8, 8);
  t.grid(3, 3) = 5.0;
  const auto img = colorize(t.grid);
  EXPECT_EQ(img(3, 3), jet(1.0));
  EXPECT_EQ(img(0, 0), jet(0.0));
}

TEST(Render, ScaleInvariant) {
  Engine rng(34);
  const auto maps = oracle::random_maps(7, 20, 14, rng);
  auto t = accumulate_dmm(maps, 0, TemporalWindow::all());
  const auto a = render_template(t, 32, 24);
  for (auto& v : t.grid.data) v *= 7.3;
  EXPECT_EQ(render_template(t, 32, 24), a);
}

TEST(Render, WideGridIsLetterboxed) {
  DmmTemplate t;
  t.grid = ScalarGrid(32, 18, 1.0);
  t.grid(0, 0) = 0.0;
  const auto img = render_template(t, 32, 32);
  ASSERT_EQ(img.width, 32u);
  ASSERT_EQ(img.height, 32u);
  const Rgb black{0, 0, 0};
  // Content is 32x18 centred: rows 7..24 carry it, the bands above and below are black.
  for (std::size_t y = 0; y < 32; ++y) {
    const bool band = y < 7 || y >= 25;
    for (std::size_t x = 0; x < 32; ++x) {
      if (band) EXPECT_EQ(img(x, y), black) << x << "," << y;
    }
    if (!band) EXPECT_NE(img(16, y), black) << y;
  }
}

TEST(Render, TooSmallCanvas) {
  DmmTemplate t;
  t.grid = ScalarGrid(4, 4);
  EXPECT_THROW(render_template(t, 7, 8), ContractError);
}

TEST(Clip, Stacking) {
  const std::vector<ColorImage> r{tagged(0), tagged(1), tagged(2)};
  const auto c = stack_clip(r, 2, 2);
  ASSERT_EQ(c.lambda(), 2u);
  EXPECT_EQ(c.frames[0], tagged(1));
  EXPECT_EQ(c.frames[1], tagged(2));
  EXPECT_EQ(stack_clip(r, 0, 1).frames[0], tagged(0));
  EXPECT_THROW(stack_clip(r, 1, 3), ContractError);

  std::vector<ColorImage> many;
  for (int i = 0; i < 20; ++i) many.push_back(tagged(static_cast<std::uint8_t>(i)));
  const auto big = stack_clip(many, 19, 16);
  for (std::size_t k = 0; k < 16; ++k) EXPECT_EQ(big.frames[k], tagged(static_cast<std::uint8_t>(4 + k)));
}

TEST(Clip, EndsTileWithStrideLambda) {
  EXPECT_EQ(clip_ends(38, 16), (std::vector<std::size_t>{15, 31}));
  EXPECT_EQ(clip_ends(16, 16), (std::vector<std::size_t>{15}));
  EXPECT_TRUE(clip_ends(15, 16).empty());
}
