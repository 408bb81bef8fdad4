#include "mvdmm/videoio.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "byteio.hpp"
#include "mvdmm/error.hpp"

namespace mvdmm {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kDepthHeaderBytes = 12;

struct PnmHeader {
  std::string magic;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t maxval = 0;
  std::size_t data_offset = 0;
};

PnmHeader parse_pnm_header(std::span<const std::uint8_t> bytes, const std::string& what) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto token = [&] {
    skip_space();
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
      tok.push_back(static_cast<char>(bytes[pos++]));
    }
    if (tok.empty()) throw ParseError(what + ": truncated header");
    return tok;
  };
  auto number = [&] {
    const auto tok = token();
    if (!std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(c); })) {
      throw ParseError(what + ": bad header field '" + tok + "'");
    }
    return static_cast<std::size_t>(std::stoull(tok));
  };

  PnmHeader h;
  h.magic = token();
  h.width = number();
  h.height = number();
  h.maxval = number();
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw ParseError(what + ": missing whitespace after header");
  }
  h.data_offset = pos + 1;
  if (h.width == 0 || h.height == 0) throw FormatError(what + ": zero image dimensions");
  return h;
}

}  // namespace

void validate(const DepthSequence& seq) {
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const auto& f = seq.frames[i];
    if (f.depth.data.size() != f.width() * f.height()) {
      throw FormatError("depth frame " + std::to_string(i) + " has inconsistent buffer size");
    }
    if (!f.depth.same_shape(seq.frames.front().depth)) {
      throw FormatError("depth frame " + std::to_string(i) + " differs in dimensions");
    }
    if (f.index != i) throw FormatError("depth frame indices must run 0..n-1");
  }
}

void validate(const RgbSequence& seq) {
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const auto& f = seq.frames[i];
    if (f.pixels.data.size() != f.width() * f.height()) {
      throw FormatError("rgb frame " + std::to_string(i) + " has inconsistent buffer size");
    }
    if (!f.pixels.same_shape(seq.frames.front().pixels)) {
      throw FormatError("rgb frame " + std::to_string(i) + " differs in dimensions");
    }
    if (f.index != i) throw FormatError("rgb frame indices must run 0..n-1");
  }
}

DepthSequence parse_depth_bin(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kDepthHeaderBytes) {
    throw ParseError("depth container: truncated header (expected 12 bytes, got " +
                     std::to_string(bytes.size()) + ")");
  }
  detail::ByteReader in(bytes, "depth container");
  const std::uint64_t frames = in.u32();
  const std::uint64_t width = in.u32();
  const std::uint64_t height = in.u32();
  if (frames == 0 || width == 0 || height == 0) {
    throw FormatError("depth container: header declares zero frames or dimensions");
  }
  std::uint64_t expected = 0;
  if (__builtin_mul_overflow(frames * width, height * 4, &expected) ||
      __builtin_add_overflow(expected, std::uint64_t{kDepthHeaderBytes}, &expected)) {
    throw ParseError("depth container: header declares " + std::to_string(frames) + "x" +
                     std::to_string(width) + "x" + std::to_string(height) +
                     " pixels, far more than the " + std::to_string(bytes.size()) +
                     " bytes present");
  }
  if (expected != bytes.size()) {
    throw ParseError("depth container: expected " + std::to_string(expected) + " bytes, got " +
                     std::to_string(bytes.size()));
  }

  DepthSequence seq;
  seq.frames.reserve(frames);
  for (std::uint64_t f = 0; f < frames; ++f) {
    DepthFrame frame{Grid<std::uint32_t>(width, height), f};
    for (auto& v : frame.depth.data) v = in.u32();
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

DepthSequence read_depth_bin(const fs::path& path) {
  return parse_depth_bin(read_file(path));
}

std::vector<std::uint8_t> encode_depth_bin(const DepthSequence& seq) {
  if (seq.empty()) throw EmptyInputError("depth container: no frames to write");
  validate(seq);
  detail::ByteWriter out;
  out.u32(static_cast<std::uint32_t>(seq.size()));
  out.u32(static_cast<std::uint32_t>(seq.width()));
  out.u32(static_cast<std::uint32_t>(seq.height()));
  for (const auto& f : seq.frames) {
    for (auto v : f.depth.data) out.u32(v);
  }
  return std::move(out.bytes());
}

void write_depth_bin(const DepthSequence& seq, const fs::path& path) {
  write_file(path, encode_depth_bin(seq));
}

ColorImage decode_ppm(std::span<const std::uint8_t> bytes) {
  const auto h = parse_pnm_header(bytes, "ppm");
  if (h.magic != "P6") throw FormatError("ppm: expected P6, got " + h.magic);
  if (h.maxval != 255) throw FormatError("ppm: only maxval 255 is supported");
  const std::size_t need = h.width * h.height * 3;
  if (bytes.size() - h.data_offset < need) {
    throw ParseError("ppm: expected " + std::to_string(h.data_offset + need) + " bytes, got " +
                     std::to_string(bytes.size()));
  }
  ColorImage img(h.width, h.height);
  const auto* p = bytes.data() + h.data_offset;
  for (auto& px : img.data) {
    px = Rgb{p[0], p[1], p[2]};
    p += 3;
  }
  return img;
}

Grid<std::uint16_t> decode_pgm(std::span<const std::uint8_t> bytes) {
  const auto h = parse_pnm_header(bytes, "pgm");
  if (h.magic != "P5") throw FormatError("pgm: expected P5, got " + h.magic);
  if (h.maxval != 65535) throw FormatError("pgm: only maxval 65535 is supported");
  const std::size_t need = h.width * h.height * 2;
  if (bytes.size() - h.data_offset < need) {
    throw ParseError("pgm: expected " + std::to_string(h.data_offset + need) + " bytes, got " +
                     std::to_string(bytes.size()));
  }
  Grid<std::uint16_t> img(h.width, h.height);
  const auto* p = bytes.data() + h.data_offset;
  for (auto& v : img.data) {
    v = static_cast<std::uint16_t>((p[0] << 8) | p[1]);
    p += 2;
  }
  return img;
}

ColorImage read_ppm(const fs::path& path) { return decode_ppm(read_file(path)); }

Grid<std::uint16_t> read_pgm(const fs::path& path) { return decode_pgm(read_file(path)); }

std::vector<std::uint8_t> encode_ppm(const ColorImage& image) {
  if (image.empty()) throw ContractError("write_image: empty image");
  detail::ByteWriter out;
  out.raw("P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n");
  for (const auto& px : image.data) {
    out.u8(px.r);
    out.u8(px.g);
    out.u8(px.b);
  }
  return std::move(out.bytes());
}

std::vector<std::uint8_t> encode_pgm(const Grid<std::uint16_t>& image) {
  if (image.empty()) throw ContractError("write_image: empty image");
  detail::ByteWriter out;
  out.raw("P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
          "\n65535\n");
  for (auto v : image.data) {
    out.u8(static_cast<std::uint8_t>(v >> 8));
    out.u8(static_cast<std::uint8_t>(v & 0xff));
  }
  return std::move(out.bytes());
}

void write_image(const ColorImage& image, const fs::path& path) {
  write_file(path, encode_ppm(image));
}

void write_image(const Grid<std::uint16_t>& image, const fs::path& path) {
  write_file(path, encode_pgm(image));
}

RgbSequence read_rgb_sequence(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("rgb sequence: not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw EmptyInputError("rgb sequence: no .ppm files in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  RgbSequence seq;
  seq.frames.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    auto img = read_ppm(files[i]);
    if (!seq.empty() && !img.same_shape(seq.frames.front().pixels)) {
      throw FormatError("rgb sequence: " + files[i].filename().string() + " is " +
                        std::to_string(img.width) + "x" + std::to_string(img.height) +
                        ", expected " + std::to_string(seq.width()) + "x" +
                        std::to_string(seq.height()));
    }
    seq.frames.push_back(RgbFrame{std::move(img), i});
  }
  return seq;
}

void write_rgb_sequence(const RgbSequence& seq, const fs::path& dir) {
  if (seq.empty()) throw EmptyInputError("rgb sequence: no frames to write");
  validate(seq);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& f : seq.frames) {
    char name[32];
    std::snprintf(name, sizeof name, "f%04zu.ppm", f.index);
    write_image(f.pixels, dir / name);
  }
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace mvdmm
