#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvdmm/videoio.hpp"

namespace mvdmm {

/// Person bounding box in pixels; x, y is the top-left corner.
struct CropBox {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;

  friend bool operator==(const CropBox&, const CropBox&) = default;
};

struct SampleRecord {
  std::filesystem::path depth_path;
  std::optional<std::filesystem::path> rgb_path;
  std::string label;
  int subject = 0;
  int camera = 0;
  std::string pose;
  std::optional<std::filesystem::path> crop_path;
  int repetition = -1;  // -1 when unknown
};

/// Decoded sample payload. `crops` is empty, holds one box for all frames, or one per frame.
struct LoadedSample {
  DepthSequence depth;
  std::optional<RgbSequence> rgb;
  std::vector<CropBox> crops;
};

// Manifest: one record per line, tab-separated: depth path, rgb dir or '-', label,
// subject, camera, pose, [crop file or '-'], [repetition]. Relative paths resolve
// against the manifest's directory. Blank lines and '#' comments are skipped.
std::vector<SampleRecord> parse_manifest(std::string_view text,
                                         const std::filesystem::path& base_dir = {});
std::vector<SampleRecord> read_manifest(const std::filesystem::path& path);
std::string format_manifest(const std::vector<SampleRecord>& records,
                            const std::filesystem::path& base_dir = {});
void write_manifest(const std::vector<SampleRecord>& records, const std::filesystem::path& path);

/// Crop file: one "x y width height" line per frame, or a single line for all frames.
std::vector<CropBox> parse_crop_boxes(std::string_view text);
std::string format_crop_boxes(const std::vector<CropBox>& boxes);

/// Reads the depth, RGB and crop files of a record and checks boxes lie inside the frame.
LoadedSample load_sample(const SampleRecord& record);

/// Throws ContractError unless every box is inside a width x height frame and
/// the count is 0, 1 or `frames`.
void check_crop_boxes(const std::vector<CropBox>& boxes, std::size_t frames, std::size_t width,
                      std::size_t height);

enum class Protocol { cross_subject, cross_view, one_third, two_thirds };

Protocol parse_protocol(std::string_view text);
std::string_view to_string(Protocol protocol);

/// Train/test rule. Empty id lists select the default partition of the protocol:
/// cross-subject trains on every other subject (sorted ids at even positions),
/// cross-view holds out the highest camera id, one-third trains on repetition 0
/// and two-thirds on repetitions 0 and 1.
struct Split {
  Protocol protocol = Protocol::cross_subject;
  std::vector<int> train_ids;
  std::vector<int> test_ids;

  [[nodiscard]] std::string describe() const;
};

struct Partition {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Throws ProtocolError if an id is listed on both sides or a record lacks the needed metadata.
Partition partition(const std::vector<SampleRecord>& records, const Split& split);

}  // namespace mvdmm
