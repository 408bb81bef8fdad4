#include <gtest/gtest.h>

#include "mvdmm/config.hpp"
#include "mvdmm/error.hpp"
#include "oracles.hpp"

using namespace mvdmm;

TEST(Config, DefaultsAreValid) {
  const PipelineConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  EXPECT_EQ(cfg.angles.size(), 7u);
  EXPECT_EQ(cfg.windows.size(), 3u);
  EXPECT_EQ(cfg.rgb_windows, (std::vector<std::size_t>{10, 16, 25}));
  EXPECT_EQ(cfg.poses.size(), 2u);
}

TEST(Config, EmptyTextKeepsDefaults) {
  EXPECT_EQ(format_config(parse_config("")), format_config(PipelineConfig{}));
}

TEST(Config, FormatParseRoundTrip) {
  PipelineConfig cfg;
  cfg.angles = {-30, 0, 12.5};
  cfg.windows = {TemporalWindow::of(7), TemporalWindow::all()};
  cfg.rgb_windows = {16};
  cfg.planes = {Plane::yz, Plane::xy};
  cfg.poses = {"sitting"};
  cfg.render_height = 40;
  cfg.concat_planes = false;
  cfg.intrinsics = Intrinsics{300.5, 160, 120};
  cfg.bins = {25.0, 80, 500.0};
  cfg.flow.iterations = 30;
  cfg.normalization = Normalization::per_sequence;
  cfg.network = NetworkKind::desk;
  cfg.desk.fc_units = 32;
  cfg.weights_dir = "nets/a b";
  cfg.seed = 1234567890123ULL;
  cfg.pca_target = PcaTarget::components(12);
  cfg.pca_whiten = false;
  cfg.svm.lambda = 0.1 + 0.2;
  cfg.score_mode = ScoreMode::raw;
  const auto text = format_config(cfg);
  const auto back = parse_config(text);
  EXPECT_EQ(format_config(back), text);
  EXPECT_EQ(back.angles, cfg.angles);
  EXPECT_EQ(back.svm.lambda, cfg.svm.lambda);
  ASSERT_TRUE(back.intrinsics);
  EXPECT_EQ(back.intrinsics->focal, 300.5);
  EXPECT_EQ(back.weights_dir, "nets/a b");
  EXPECT_EQ(back.seed, cfg.seed);
}

TEST(Config, FileRoundTrip) {
  oracle::TempDir dir("config_file");
  PipelineConfig cfg;
  cfg.angles = {0};
  save_config(cfg, dir.path() / "c.txt");
  EXPECT_EQ(format_config(load_config(dir.path() / "c.txt")), format_config(cfg));
}

TEST(Config, SectionsAndComments) {
  const auto cfg = parse_config(R"(# comment
angles = [-15, 15]
windows = 5, ALL

[render]
height = 64   # trailing
[network]
kind = "desk"
)");
  EXPECT_EQ(cfg.angles, (std::vector<double>{-15, 15}));
  EXPECT_EQ(cfg.windows, (std::vector<TemporalWindow>{TemporalWindow::of(5), TemporalWindow::all()}));
  EXPECT_EQ(cfg.render_height, 64u);
  EXPECT_EQ(cfg.network, NetworkKind::desk);
}

TEST(Config, AutomaticIntrinsics) {
  EXPECT_FALSE(parse_config("[geometry]\nfocal = 0\n").intrinsics);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("bogus = 1"), ConfigError);
  EXPECT_THROW(parse_config("[render]\nangles = [0]"), ConfigError);
  EXPECT_THROW(parse_config("seed = 1\nseed = 2"), ConfigError);
  EXPECT_THROW(parse_config("angles = []"), ConfigError);
  EXPECT_THROW(parse_config("windows = [1]"), ConfigError);
  EXPECT_THROW(parse_config("angles = [200]"), ConfigError);
  EXPECT_THROW(parse_config("[render]\nheight = 4"), ConfigError);
  EXPECT_THROW(parse_config("seed = -3"), ConfigError);
  EXPECT_THROW(parse_config("[pca]\nenabled = yes"), ConfigError);
  EXPECT_THROW(parse_config("angles = [0, 0]"), ConfigError);
  EXPECT_THROW(parse_config("no equals sign"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/mvdmm.cfg"), IoError);
}

TEST(Config, ListHelpers) {
  EXPECT_EQ(parse_angle_list("-30,0,30"), (std::vector<double>{-30, 0, 30}));
  EXPECT_EQ(parse_angle_list("[ -45 , 45 ]"), (std::vector<double>{-45, 45}));
  EXPECT_EQ(parse_window_list("5,10,ALL"),
            (std::vector<TemporalWindow>{TemporalWindow::of(5), TemporalWindow::of(10),
                                         TemporalWindow::all()}));
  EXPECT_THROW(parse_angle_list("a,b"), ConfigError);
  EXPECT_EQ(parse_network_kind(to_string(NetworkKind::c3d)), NetworkKind::c3d);
}
