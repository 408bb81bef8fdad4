#include <gtest/gtest.h>

#include <set>

#include "mvdmm/error.hpp"
#include "mvdmm/streams.hpp"
#include "oracles.hpp"

using namespace mvdmm;

namespace {

PipelineConfig sized(std::size_t poses, std::size_t planes, std::size_t angles,
                     std::size_t windows, std::size_t rgb) {
  PipelineConfig cfg;
  const std::vector<std::string> pose_names{"sitting", "standing", "lying"};
  cfg.poses.assign(pose_names.begin(), pose_names.begin() + static_cast<long>(poses));
  cfg.planes.assign(kAllPlanes.begin(), kAllPlanes.begin() + static_cast<long>(planes));
  cfg.angles.clear();
  for (std::size_t i = 0; i < angles; ++i) cfg.angles.push_back(-45.0 + 15.0 * static_cast<double>(i));
  const std::vector<TemporalWindow> w{TemporalWindow::of(5), TemporalWindow::of(10), TemporalWindow::all(),
                                      TemporalWindow::of(3)};
  cfg.windows.assign(w.begin(), w.begin() + static_cast<long>(windows));
  const std::vector<std::size_t> r{10, 16, 25, 8};
  cfg.rgb_windows.assign(r.begin(), r.begin() + static_cast<long>(rgb));
  return cfg;
}

}  // namespace

TEST(Streams, DefaultTopology) {
  const auto plan = build_streams(PipelineConfig{});
  EXPECT_EQ(plan.streams.size(), 132u);
  EXPECT_EQ(plan.dmm_stream_count(), 126u);
  EXPECT_EQ(plan.rgb_stream_count(), 6u);
}

TEST(Streams, SmallCounts) {
  EXPECT_EQ(build_streams(sized(1, 1, 1, 1, 0)).streams.size(), 1u);
  EXPECT_EQ(build_streams(sized(1, 3, 3, 2, 2)).streams.size(), 20u);
}

TEST(Streams, FormulaHoldsForRandomConfigs) {
  Engine rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cfg = sized(1 + uniform_index(rng, 3), 1 + uniform_index(rng, 3),
                           1 + uniform_index(rng, 7), 1 + uniform_index(rng, 4), uniform_index(rng, 5));
    const auto plan = build_streams(cfg);
    EXPECT_EQ(plan.streams.size(), expected_stream_count(cfg));
    std::set<std::string> names;
    for (const auto& s : plan.streams) names.insert(s.name());
    EXPECT_EQ(names.size(), plan.streams.size());
    std::size_t covered = 0;
    for (const auto& slot : plan.slots) covered += slot.streams.size();
    EXPECT_EQ(covered, plan.streams.size());
  }
}

TEST(Streams, EmptySetsRejected) {
  auto cfg = sized(1, 3, 3, 2, 2);
  cfg.angles.clear();
  EXPECT_THROW(build_streams(cfg), ConfigError);
  cfg = sized(1, 3, 3, 2, 2);
  cfg.windows.clear();
  EXPECT_THROW(build_streams(cfg), ConfigError);
}

TEST(Streams, OrderAndNames) {
  auto cfg = sized(1, 3, 2, 1, 1);
  cfg.poses = {"standing"};
  const auto plan = build_streams(cfg);
  ASSERT_EQ(plan.streams.size(), 7u);
  EXPECT_EQ(plan.streams[0].name(), "standing/dmm/xy/w5/a-45");
  EXPECT_EQ(plan.streams[1].name(), "standing/dmm/yz/w5/a-45");
  EXPECT_EQ(plan.streams[3].name(), "standing/dmm/xy/w5/a-30");
  EXPECT_EQ(plan.streams[6].name(), "standing/rgb/r10");
  EXPECT_EQ(plan.streams[0].file_stem(), "standing_dmm_xy_w5_a-45");
  ASSERT_EQ(plan.slots.size(), 3u);
  EXPECT_EQ(plan.slots[0].name(), "standing/dmm/xyz/w5/a-45");
  EXPECT_EQ(plan.slots[0].streams, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(plan.slots[2].streams, (std::vector<std::size_t>{6}));
}

TEST(Streams, PerPlaneSlots) {
  auto cfg = sized(2, 3, 2, 2, 1);
  cfg.concat_planes = false;
  const auto plan = build_streams(cfg);
  EXPECT_EQ(plan.slots.size(), plan.streams.size());
  for (const auto& slot : plan.slots) EXPECT_EQ(slot.streams.size(), 1u);
}

TEST(Streams, InputShapes) {
  PipelineConfig cfg;
  const auto plan = build_streams(cfg);
  EXPECT_EQ(stream_input_shape(cfg, plan.streams[0]), (Shape4{3, 16, 112, 112}));
  EXPECT_EQ(stream_input_shape(cfg, plan.streams[63]), (Shape4{3, 10, 112, 112}));
  EXPECT_EQ(plan.streams[63].kind, StreamKind::rgb);
}

TEST(Streams, NetworksSeededPerStream) {
  auto cfg = sized(1, 3, 1, 1, 0);
  cfg.network = NetworkKind::desk;
  cfg.render_height = cfg.render_width = 16;
  cfg.dmm_lambda = 8;
  const auto plan = build_streams(cfg);
  const auto a = encode_weights(stream_network(cfg, plan, 0));
  EXPECT_EQ(encode_weights(stream_network(cfg, plan, 0)), a);
  EXPECT_NE(encode_weights(stream_network(cfg, plan, 1)), a);
  cfg.seed = 2;
  EXPECT_NE(encode_weights(stream_network(cfg, plan, 0)), a);
}

TEST(Streams, WeightsDirectoryOverridesSeed) {
  oracle::TempDir dir("streams_weights");
  auto cfg = sized(1, 1, 1, 1, 0);
  cfg.network = NetworkKind::desk;
  cfg.render_height = cfg.render_width = 16;
  cfg.dmm_lambda = 8;
  const auto plan = build_streams(cfg);
  auto net = stream_network(cfg, plan, 0);
  initialize_weights(net, 999);
  save_weights(net, dir.path() / (plan.streams[0].file_stem() + ".wts"));
  cfg.weights_dir = dir.path().string();
  EXPECT_EQ(encode_weights(stream_network(cfg, plan, 0)), encode_weights(net));
  cfg.render_height = 24;
  EXPECT_THROW(stream_network(cfg, build_streams(cfg), 0), FormatError);
}

TEST(Streams, AngleFormatting) {
  EXPECT_EQ(format_angle(-30), "-30");
  EXPECT_EQ(format_angle(12.5), "12.5");
  EXPECT_EQ(format_angle(0), "0");
}
