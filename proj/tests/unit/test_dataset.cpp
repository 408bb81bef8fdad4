#include <gtest/gtest.h>

#include "mvdmm/dataset.hpp"
#include "mvdmm/error.hpp"
#include "oracles.hpp"

using namespace mvdmm;

namespace {

SampleRecord rec(std::string label, int subject, int camera, int rep = -1) {
  SampleRecord r;
  r.depth_path = label + std::to_string(subject) + std::to_string(camera) + ".bin";
  r.label = std::move(label);
  r.subject = subject;
  r.camera = camera;
  r.pose = "standing";
  r.repetition = rep;
  return r;
}

std::vector<SampleRecord> grid_records() {
  std::vector<SampleRecord> out;
  for (const char* a : {"wave", "push"})
    for (int s = 1; s <= 4; ++s)
      for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r) out.push_back(rec(a, s, c, r));
  return out;
}

}  // namespace

TEST(Manifest, ParseFields) {
  const auto rs = parse_manifest(
      "# header\n"
      "a/depth.bin\ta/rgb\twave\t3\t1\tsitting\n"
      "\n"
      "b/depth.bin\t-\tpush\t4\t0\tstanding\tb/crop.txt\t2\n",
      "/data");
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_EQ(rs[0].depth_path, "/data/a/depth.bin");
  EXPECT_EQ(rs[0].rgb_path, std::filesystem::path("/data/a/rgb"));
  EXPECT_EQ(rs[0].label, "wave");
  EXPECT_EQ(rs[0].subject, 3);
  EXPECT_EQ(rs[0].camera, 1);
  EXPECT_EQ(rs[0].pose, "sitting");
  EXPECT_FALSE(rs[0].crop_path);
  EXPECT_EQ(rs[0].repetition, -1);
  EXPECT_FALSE(rs[1].rgb_path);
  EXPECT_EQ(rs[1].crop_path, std::filesystem::path("/data/b/crop.txt"));
  EXPECT_EQ(rs[1].repetition, 2);
}

TEST(Manifest, Errors) {
  EXPECT_THROW(parse_manifest("a\tb\tc\n"), ParseError);
  EXPECT_THROW(parse_manifest("d\t-\twave\tx\t0\tsitting\n"), ParseError);
}

TEST(Manifest, FileRoundTrip) {
  oracle::TempDir dir("dataset_manifest");
  auto rs = grid_records();
  for (auto& r : rs) r.depth_path = dir.path() / r.depth_path;
  rs[1].rgb_path = dir.path() / "rgb1";
  rs[2].crop_path = dir.path() / "crop.txt";
  write_manifest(rs, dir.path() / "m.tsv");
  const auto back = read_manifest(dir.path() / "m.tsv");
  ASSERT_EQ(back.size(), rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    EXPECT_EQ(back[i].depth_path, rs[i].depth_path);
    EXPECT_EQ(back[i].rgb_path, rs[i].rgb_path);
    EXPECT_EQ(back[i].crop_path, rs[i].crop_path);
    EXPECT_EQ(back[i].label, rs[i].label);
    EXPECT_EQ(back[i].repetition, rs[i].repetition);
  }
}

TEST(Crops, ParseFormatAndBounds) {
  const auto boxes = parse_crop_boxes("1 2 3 4\n5 6 7 8\n");
  ASSERT_EQ(boxes.size(), 2u);
  EXPECT_EQ(boxes[1], (CropBox{5, 6, 7, 8}));
  EXPECT_EQ(parse_crop_boxes(format_crop_boxes(boxes)), boxes);
  EXPECT_THROW(parse_crop_boxes("1 2 3\n"), ParseError);
  EXPECT_NO_THROW(check_crop_boxes(boxes, 2, 20, 20));
  EXPECT_THROW(check_crop_boxes(boxes, 2, 10, 10), ContractError);
  EXPECT_THROW(check_crop_boxes(boxes, 3, 20, 20), ContractError);
  EXPECT_NO_THROW(check_crop_boxes({boxes[0]}, 9, 20, 20));
}

TEST(LoadSample, ReadsFilesAndChecksCrops) {
  oracle::TempDir dir("dataset_load");
  DepthSequence seq;
  for (std::size_t f = 0; f < 3; ++f) seq.frames.push_back({Grid<std::uint32_t>(8, 6, 1000), f});
  write_depth_bin(seq, dir.path() / "d.bin");
  RgbSequence rgb;
  for (std::size_t f = 0; f < 3; ++f) rgb.frames.push_back({ColorImage(8, 6, Rgb{1, 2, 3}), f});
  write_rgb_sequence(rgb, dir.path() / "rgb");
  write_file(dir.path() / "crop.txt", std::vector<std::uint8_t>{'1', ' ', '1', ' ', '4', ' ', '4', '\n'});
  auto r = rec("wave", 1, 0);
  r.depth_path = dir.path() / "d.bin";
  r.rgb_path = dir.path() / "rgb";
  r.crop_path = dir.path() / "crop.txt";
  const auto s = load_sample(r);
  EXPECT_EQ(s.depth, seq);
  ASSERT_TRUE(s.rgb);
  EXPECT_EQ(*s.rgb, rgb);
  EXPECT_EQ(s.crops, (std::vector<CropBox>{{1, 1, 4, 4}}));
  write_file(dir.path() / "crop.txt", std::vector<std::uint8_t>{'6', ' ', '1', ' ', '4', ' ', '4', '\n'});
  EXPECT_THROW(load_sample(r), ContractError);
}

TEST(Split, DefaultCrossSubject) {
  const auto rs = grid_records();
  const auto p = partition(rs, {Protocol::cross_subject, {}, {}});
  for (auto i : p.train) EXPECT_TRUE(rs[i].subject == 1 || rs[i].subject == 3);
  for (auto i : p.test) EXPECT_TRUE(rs[i].subject == 2 || rs[i].subject == 4);
  EXPECT_EQ(p.train.size() + p.test.size(), rs.size());
}

TEST(Split, ExplicitIds) {
  const auto rs = grid_records();
  const auto p = partition(rs, {Protocol::cross_subject, {1}, {4}});
  for (auto i : p.train) EXPECT_EQ(rs[i].subject, 1);
  for (auto i : p.test) EXPECT_EQ(rs[i].subject, 4);
  EXPECT_EQ(p.test.size(), 18u);
}

TEST(Split, CrossViewHoldsOutHighestCamera) {
  const auto rs = grid_records();
  const auto p = partition(rs, {Protocol::cross_view, {}, {}});
  for (auto i : p.train) EXPECT_LT(rs[i].camera, 2);
  for (auto i : p.test) EXPECT_EQ(rs[i].camera, 2);
}

TEST(Split, Repetitions) {
  const auto rs = grid_records();
  const auto third = partition(rs, {Protocol::one_third, {}, {}});
  EXPECT_EQ(third.train.size() * 3, rs.size());
  const auto two = partition(rs, {Protocol::two_thirds, {}, {}});
  EXPECT_EQ(two.train.size() * 3, rs.size() * 2);
  auto missing = rs;
  missing[5].repetition = -1;
  EXPECT_THROW(partition(missing, {Protocol::one_third, {}, {}}), ProtocolError);
}

TEST(Split, OverlapIsProtocolError) {
  EXPECT_THROW(partition(grid_records(), {Protocol::cross_subject, {1, 2}, {2, 3}}), ProtocolError);
}

TEST(Split, Text) {
  for (auto p : {Protocol::cross_subject, Protocol::cross_view, Protocol::one_third, Protocol::two_thirds}) {
    EXPECT_EQ(parse_protocol(to_string(p)), p);
  }
  EXPECT_EQ(to_string(Protocol::cross_subject), "cross-subject");
  EXPECT_THROW(parse_protocol("random"), ConfigError);
  EXPECT_NE(Split({Protocol::cross_subject, {0, 2}, {}}).describe().find("cross-subject"), std::string::npos);
}
