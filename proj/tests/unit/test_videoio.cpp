#include <gtest/gtest.h>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "mvdmm/dmm.hpp"
#include "mvdmm/error.hpp"
#include "mvdmm/videoio.hpp"
#include "oracles.hpp"

using namespace mvdmm;

namespace {

std::vector<std::uint8_t> le32(std::initializer_list<std::uint32_t> words) {
  std::vector<std::uint8_t> out;
  for (auto w : words) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(w >> (8 * i)));
  }
  return out;
}

template <class E, class F>
std::string message_of(F&& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  return {};
}

ColorImage solid(std::size_t w, std::size_t h, Rgb c) { return ColorImage(w, h, c); }

}  // namespace

TEST(DepthBin, MinimalContainer) {
  const auto seq = parse_depth_bin(le32({2, 1, 1, 7, 9}));
  ASSERT_EQ(seq.size(), 2u);
  EXPECT_EQ(seq.frames[0].depth(0, 0), 7u);
  EXPECT_EQ(seq.frames[1].depth(0, 0), 9u);
  EXPECT_EQ(seq.frames[1].index, 1u);
}

TEST(DepthBin, AllZeroFrame) {
  const auto seq = parse_depth_bin(le32({1, 2, 2, 0, 0, 0, 0}));
  ASSERT_EQ(seq.size(), 1u);
  EXPECT_EQ(seq.width(), 2u);
  EXPECT_EQ(seq.height(), 2u);
  for (auto v : seq.frames[0].depth.data) EXPECT_EQ(v, 0u);
}

TEST(DepthBin, TruncatedHeader) {
  const std::vector<std::uint8_t> bytes(11, 0);
  const auto msg = message_of<ParseError>([&] { parse_depth_bin(bytes); });
  EXPECT_NE(msg.find("truncated header"), std::string::npos) << msg;
}

TEST(DepthBin, TruncatedPayloadNamesByteCounts) {
  const auto msg = message_of<ParseError>([] { parse_depth_bin(le32({2, 2, 1, 1, 2, 3})); });
  EXPECT_NE(msg.find("expected 28"), std::string::npos) << msg;
  EXPECT_NE(msg.find("got 24"), std::string::npos) << msg;
}

TEST(DepthBin, ZeroDimensionsAreFormatErrors) {
  EXPECT_THROW(parse_depth_bin(le32({1, 0, 3})), FormatError);
  EXPECT_THROW(parse_depth_bin(le32({0, 3, 3})), FormatError);
}

TEST(DepthBin, HugeHeaderDoesNotOverflow) {
  EXPECT_THROW(parse_depth_bin(le32({0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu})), ParseError);
}

TEST(DepthBin, ByteOrderIsLittleEndian) {
  auto bytes = le32({1, 1, 1});
  bytes.insert(bytes.end(), {0x01, 0x02, 0x03, 0x04});
  EXPECT_EQ(parse_depth_bin(bytes).frames[0].depth(0, 0), 0x04030201u);
}

TEST(DepthBin, FileRoundTrip) {
  oracle::TempDir dir("videoio_depth");
  Engine rng(5);
  DepthSequence seq;
  for (std::size_t f = 0; f < 3; ++f) {
    DepthFrame frame{Grid<std::uint32_t>(5, 4), f};
    for (auto& v : frame.depth.data) v = static_cast<std::uint32_t>(uniform_index(rng, 5000));
    seq.frames.push_back(frame);
  }
  write_depth_bin(seq, dir.path() / "d.bin");
  EXPECT_EQ(read_depth_bin(dir.path() / "d.bin"), seq);
  EXPECT_EQ(read_file(dir.path() / "d.bin").size(), 12u + 3 * 5 * 4 * 4);
}

TEST(RgbSequence, OrderedByFilename) {
  oracle::TempDir dir("videoio_rgb");
  write_image(solid(4, 4, {1, 2, 3}), dir.path() / "f001.ppm");
  write_image(solid(4, 4, {9, 8, 7}), dir.path() / "f000.ppm");
  const auto seq = read_rgb_sequence(dir.path());
  ASSERT_EQ(seq.size(), 2u);
  EXPECT_EQ(seq.frames[0].pixels(0, 0), (Rgb{9, 8, 7}));
  EXPECT_EQ(seq.frames[1].pixels(0, 0), (Rgb{1, 2, 3}));
  EXPECT_EQ(seq.frames[1].index, 1u);
}

TEST(RgbSequence, MixedDimensions) {
  oracle::TempDir dir("videoio_mixed");
  write_image(solid(4, 4, {}), dir.path() / "f000.ppm");
  write_image(solid(8, 8, {}), dir.path() / "f001.ppm");
  EXPECT_THROW(read_rgb_sequence(dir.path()), FormatError);
}

TEST(RgbSequence, EmptyDirectory) {
  oracle::TempDir dir("videoio_empty");
  EXPECT_THROW(read_rgb_sequence(dir.path()), EmptyInputError);
}

TEST(Ppm, SinglePixelPayload) {
  const auto bytes = encode_ppm(solid(1, 1, {255, 0, 0}));
  const std::string header = "P6\n1 1\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 3);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + static_cast<long>(header.size())), header);
  EXPECT_EQ(bytes[header.size()], 255);
  EXPECT_EQ(bytes[header.size() + 1], 0);
  EXPECT_EQ(bytes[header.size() + 2], 0);
}

TEST(Pgm, ScalarRoundTrip) {
  oracle::TempDir dir("videoio_pgm");
  Grid<std::uint16_t> g(2, 2);
  g.data = {0, 1, 65535, 258};
  write_image(g, dir.path() / "g.pgm");
  EXPECT_EQ(read_pgm(dir.path() / "g.pgm"), g);
  const auto bytes = encode_pgm(g);
  // 258 = 0x0102 stored big-endian.
  EXPECT_EQ(bytes[bytes.size() - 2], 0x01);
  EXPECT_EQ(bytes[bytes.size() - 1], 0x02);
}

TEST(Ppm, RenderedTemplateRoundTrip) {
  oracle::TempDir dir("videoio_tpl");
  Engine rng(17);
  const auto maps = oracle::random_maps(6, 20, 12, rng);
  const auto tpl = accumulate_dmm(maps, 0, TemporalWindow::of(5));
  const auto img = render_template(tpl, 32, 32);
  write_image(img, dir.path() / "t.ppm");
  EXPECT_EQ(read_ppm(dir.path() / "t.ppm"), img);
}

TEST(Ppm, RejectsWrongMagicAndTruncation) {
  const std::string p5 = "P5\n1 1\n255\nx";
  EXPECT_THROW(decode_ppm({reinterpret_cast<const std::uint8_t*>(p5.data()), p5.size()}),
               FormatError);
  const std::string shortp6 = "P6\n2 2\n255\nabc";
  EXPECT_THROW(decode_ppm({reinterpret_cast<const std::uint8_t*>(shortp6.data()), shortp6.size()}),
               ParseError);
}

TEST(Io, MissingFileAndEmptyImage) {
  EXPECT_THROW(read_file("/nonexistent/mvdmm/file.bin"), IoError);
  EXPECT_THROW(encode_ppm(ColorImage{}), ContractError);
  EXPECT_THROW(write_image(solid(1, 1, {}), "/nonexistent/dir/x.ppm"), IoError);
}

TEST(Validate, FrameIndicesAndShapes) {
  DepthSequence seq;
  seq.frames.push_back({Grid<std::uint32_t>(2, 2), 0});
  seq.frames.push_back({Grid<std::uint32_t>(2, 2), 2});
  EXPECT_THROW(validate(seq), FormatError);
  seq.frames[1] = {Grid<std::uint32_t>(3, 2), 1};
  EXPECT_THROW(validate(seq), FormatError);
}
