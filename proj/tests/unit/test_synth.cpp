#include <gtest/gtest.h>

#include <cmath>

#include "mvdmm/error.hpp"
#include "mvdmm/pipeline.hpp"
#include "mvdmm/synth.hpp"
#include "oracles.hpp"

using namespace mvdmm;

namespace {

SynthSpec small_spec() {
  SynthSpec s;
  s.actions = {"translate", "static"};
  s.subjects = 2;
  s.cameras = 2;
  s.frames = 10;
  s.width = 32;
  s.height = 24;
  return s;
}

}  // namespace

TEST(Synth, CameraYaws) {
  SynthSpec s;
  s.cameras = 2;
  EXPECT_EQ(camera_yaw_deg(s, 0), -15.0);
  EXPECT_EQ(camera_yaw_deg(s, 1), 15.0);
  s.cameras = 3;
  EXPECT_EQ(camera_yaw_deg(s, 1), 0.0);
}

TEST(Synth, SameSeedSameFiles) {
  oracle::TempDir a("synth_a"), b("synth_b");
  const auto spec = small_spec();
  const auto ra = generate_synthetic_dataset(spec, 42, a.path());
  const auto rb = generate_synthetic_dataset(spec, 42, b.path());
  ASSERT_EQ(ra.size(), 8u);
  ASSERT_EQ(rb.size(), ra.size());
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a.path())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), a.path());
    if (rel == "manifest.tsv") continue;  // holds absolute paths
    EXPECT_EQ(read_file(entry.path()), read_file(b.path() / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 8u);
  const auto manifest = read_manifest(a.path() / "manifest.tsv");
  ASSERT_EQ(manifest.size(), ra.size());
  EXPECT_EQ(manifest[3].label, ra[3].label);
  EXPECT_EQ(load_sample(manifest[3]).depth, synthesize_sample(spec, 0, 1, 1, 0, 42).depth);
}

TEST(Synth, SeedsAndSubjectsChangeTakes) {
  const auto spec = small_spec();
  const auto base = synthesize_sample(spec, 0, 0, 0, 0, 1).depth;
  EXPECT_NE(synthesize_sample(spec, 0, 0, 0, 0, 2).depth, base);
  EXPECT_NE(synthesize_sample(spec, 0, 1, 0, 0, 1).depth, base);
  EXPECT_EQ(synthesize_sample(spec, 0, 0, 0, 0, 1).depth, base);
}

TEST(Synth, Preconditions) {
  auto spec = small_spec();
  spec.actions = {"translate"};
  EXPECT_THROW(synthetic_scene(spec, 0, 0, 0, 1), ContractError);
  spec = small_spec();
  spec.subjects = 1;
  EXPECT_THROW(synthetic_scene(spec, 0, 0, 0, 1), ContractError);
  spec = small_spec();
  spec.actions = {"translate", "dance"};
  EXPECT_THROW(synthetic_scene(spec, 0, 0, 0, 1), ConfigError);
}

TEST(Synth, StaticActionGivesZeroTemplates) {
  auto spec = small_spec();
  spec.depth_noise_mm = 0.0;
  const auto sample = synthesize_sample(spec, 1, 0, 1, 0, 42);
  auto cfg = desk_pipeline_config(spec);
  for (double angle : cfg.angles) {
    const auto seq = synthesized_sequence(sample, angle, cfg);
    std::array<std::vector<ProjectedMap>, 3> maps;
    for (const auto& f : seq.frames) {
      auto p = project_cartesian(f, cfg.bins, angle);
      for (std::size_t k = 0; k < 3; ++k) maps[k].push_back(p[k]);
    }
    for (const auto& m : maps) {
      std::vector<ScalarGrid> grids;
      for (const auto& x : m) grids.push_back(x.grid);
      const auto weights = motion_weights(grids);
      for (auto w : cfg.windows) {
        for (const auto& t : template_stream(m, weights, w)) {
          for (double v : t.grid.data) ASSERT_EQ(v, 0.0);
        }
      }
    }
  }
}

TEST(Synth, CameraYawMatchesViewSynthesis) {
  SynthSpec spec;
  spec.width = 64;
  spec.height = 48;
  const auto scene = synthetic_scene(spec, 0, 2, 0, 42);
  const auto cfg = desk_pipeline_config(spec);
  const auto K = Intrinsics::for_frame(spec.width, spec.height);
  for (std::size_t f : {0u, 20u, 39u}) {
    const auto front = render_depth(scene[f], spec, 0.0);
    const auto real = render_depth(scene[f], spec, 30.0);
    const auto virt = synthesize_view(front, K, {30.0, 0.0}, {0, 0, spec.pivot_depth_mm});
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < real.depth.size(); ++i) {
      if (real.depth.data[i] == 0 || virt.depth.data[i] == 0) continue;
      sum += std::fabs(double(real.depth.data[i]) - double(virt.depth.data[i]));
      ++n;
    }
    ASSERT_GT(n, real.depth.size() / 2);
    EXPECT_LT(sum / n, 2 * cfg.bins.bin_size_mm) << "frame " << f;
  }
}

TEST(Synth, NoiseFreeRenderIsExactRayCast) {
  SynthSpec spec;
  spec.width = 16;
  spec.height = 12;
  const SceneFrame wall{{{-5000, -5000, 2500}, {5000, 5000, 2600}, {10, 20, 30}}};
  const auto d = render_depth(wall, spec, 0.0);
  for (auto v : d.depth.data) EXPECT_EQ(v, 2500u);
  const auto c = render_rgb(wall, spec, 0.0);
  EXPECT_EQ(c.width, 16u);
}

TEST(Synth, DeskConfig) {
  const auto cfg = desk_pipeline_config();
  EXPECT_EQ(cfg.angles, (std::vector<double>{-30, 0, 30}));
  EXPECT_EQ(cfg.windows, (std::vector<TemporalWindow>{TemporalWindow::of(5), TemporalWindow::all()}));
  EXPECT_EQ(cfg.rgb_windows, (std::vector<std::size_t>{10, 16}));
  EXPECT_EQ(cfg.network, NetworkKind::desk);
  EXPECT_EQ(cfg.desk.fc_units, 64u);
  EXPECT_NO_THROW(validate(cfg));
}
