#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mvdmm/grid.hpp"

namespace mvdmm {

/// One depth image in millimeters; 0 marks a missing reading.
struct DepthFrame {
  Grid<std::uint32_t> depth;
  std::size_t index = 0;

  [[nodiscard]] std::size_t width() const { return depth.width; }
  [[nodiscard]] std::size_t height() const { return depth.height; }

  friend bool operator==(const DepthFrame&, const DepthFrame&) = default;
};

struct RgbFrame {
  ColorImage pixels;
  std::size_t index = 0;

  [[nodiscard]] std::size_t width() const { return pixels.width; }
  [[nodiscard]] std::size_t height() const { return pixels.height; }

  friend bool operator==(const RgbFrame&, const RgbFrame&) = default;
};

struct DepthSequence {
  std::vector<DepthFrame> frames;

  [[nodiscard]] std::size_t size() const { return frames.size(); }
  [[nodiscard]] bool empty() const { return frames.empty(); }
  [[nodiscard]] std::size_t width() const { return frames.empty() ? 0 : frames.front().width(); }
  [[nodiscard]] std::size_t height() const { return frames.empty() ? 0 : frames.front().height(); }

  friend bool operator==(const DepthSequence&, const DepthSequence&) = default;
};

struct RgbSequence {
  std::vector<RgbFrame> frames;

  [[nodiscard]] std::size_t size() const { return frames.size(); }
  [[nodiscard]] bool empty() const { return frames.empty(); }
  [[nodiscard]] std::size_t width() const { return frames.empty() ? 0 : frames.front().width(); }
  [[nodiscard]] std::size_t height() const { return frames.empty() ? 0 : frames.front().height(); }

  friend bool operator==(const RgbSequence&, const RgbSequence&) = default;
};

/// Throws FormatError when frames disagree on dimensions or indices are not 0..n-1.
void validate(const DepthSequence& seq);
void validate(const RgbSequence& seq);

// Depth container: [u32le frameCount][u32le width][u32le height] followed by
// frameCount*height*width u32le depth samples, row-major, top-left origin.
DepthSequence parse_depth_bin(std::span<const std::uint8_t> bytes);
DepthSequence read_depth_bin(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_depth_bin(const DepthSequence& seq);
void write_depth_bin(const DepthSequence& seq, const std::filesystem::path& path);

/// Reads every *.ppm in `dir` in lexicographic filename order.
RgbSequence read_rgb_sequence(const std::filesystem::path& dir);
/// Writes frames as dir/f0000.ppm, dir/f0001.ppm, ...
void write_rgb_sequence(const RgbSequence& seq, const std::filesystem::path& dir);

ColorImage read_ppm(const std::filesystem::path& path);
Grid<std::uint16_t> read_pgm(const std::filesystem::path& path);
ColorImage decode_ppm(std::span<const std::uint8_t> bytes);
Grid<std::uint16_t> decode_pgm(std::span<const std::uint8_t> bytes);

/// Binary PPM (P6, maxval 255).
void write_image(const ColorImage& image, const std::filesystem::path& path);
/// Binary PGM (P5, maxval 65535, big-endian samples).
void write_image(const Grid<std::uint16_t>& image, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_ppm(const ColorImage& image);
std::vector<std::uint8_t> encode_pgm(const Grid<std::uint16_t>& image);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace mvdmm
