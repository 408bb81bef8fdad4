#include "mvdmm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "mvdmm/error.hpp"

namespace mvdmm {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

int to_int(const std::string& s, const std::string& what) {
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw ParseError(what + ": expected an integer, got '" + s + "'");
  }
  return v;
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::string relative_to(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (base.empty()) return p.generic_string();
  const auto rel = p.lexically_relative(base);
  return (rel.empty() || *rel.begin() == "..") ? p.generic_string() : rel.generic_string();
}

std::string text_of(const std::vector<std::uint8_t>& bytes) {
  return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

}  // namespace

std::vector<SampleRecord> parse_manifest(std::string_view text,
                                         const std::filesystem::path& base_dir) {
  std::vector<SampleRecord> out;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto where = "manifest line " + std::to_string(line_no);
    const auto f = split_tabs(line);
    if (f.size() < 6 || f.size() > 8) {
      throw ParseError(where + ": expected 6 to 8 tab-separated fields, got " +
                       std::to_string(f.size()));
    }
    SampleRecord rec;
    rec.depth_path = resolve(f[0], base_dir);
    if (f[1] != "-") rec.rgb_path = resolve(f[1], base_dir);
    rec.label = f[2];
    rec.subject = to_int(f[3], where + " subject");
    rec.camera = to_int(f[4], where + " camera");
    rec.pose = f[5];
    if (rec.label.empty() || rec.pose.empty()) throw ParseError(where + ": empty label or pose");
    if (f.size() >= 7 && f[6] != "-") rec.crop_path = resolve(f[6], base_dir);
    if (f.size() == 8) rec.repetition = to_int(f[7], where + " repetition");
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<SampleRecord> read_manifest(const std::filesystem::path& path) {
  return parse_manifest(text_of(read_file(path)), path.parent_path());
}

std::string format_manifest(const std::vector<SampleRecord>& records,
                            const std::filesystem::path& base_dir) {
  std::string out = "# depth\trgb\tlabel\tsubject\tcamera\tpose\tcrop\trepetition\n";
  for (const auto& r : records) {
    out += relative_to(r.depth_path, base_dir) + '\t';
    out += (r.rgb_path ? relative_to(*r.rgb_path, base_dir) : std::string("-")) + '\t';
    out += r.label + '\t' + std::to_string(r.subject) + '\t' + std::to_string(r.camera) + '\t' +
           r.pose + '\t';
    out += (r.crop_path ? relative_to(*r.crop_path, base_dir) : std::string("-")) + '\t';
    out += std::to_string(r.repetition) + '\n';
  }
  return out;
}

void write_manifest(const std::vector<SampleRecord>& records, const std::filesystem::path& path) {
  const auto text = format_manifest(records, path.parent_path());
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::vector<CropBox> parse_crop_boxes(std::string_view text) {
  std::vector<CropBox> out;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#') continue;
    std::istringstream fields(line);
    long long x = 0, y = 0, w = 0, h = 0;
    std::string extra;
    if (!(fields >> x >> y >> w >> h) || (fields >> extra) || x < 0 || y < 0 || w <= 0 || h <= 0) {
      throw ParseError("crop file line " + std::to_string(line_no) +
                       ": expected 'x y width height' with positive size");
    }
    out.push_back({static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                   static_cast<std::size_t>(w), static_cast<std::size_t>(h)});
  }
  return out;
}

std::string format_crop_boxes(const std::vector<CropBox>& boxes) {
  std::string out;
  for (const auto& b : boxes) {
    out += std::to_string(b.x) + ' ' + std::to_string(b.y) + ' ' + std::to_string(b.width) + ' ' +
           std::to_string(b.height) + '\n';
  }
  return out;
}

void check_crop_boxes(const std::vector<CropBox>& boxes, std::size_t frames, std::size_t width,
                      std::size_t height) {
  if (boxes.size() > 1 && boxes.size() != frames) {
    throw ContractError("crop boxes: expected 1 or " + std::to_string(frames) + " boxes, got " +
                        std::to_string(boxes.size()));
  }
  for (const auto& b : boxes) {
    if (b.width == 0 || b.height == 0 || b.x + b.width > width || b.y + b.height > height) {
      throw ContractError("crop box " + std::to_string(b.x) + "," + std::to_string(b.y) + " " +
                          std::to_string(b.width) + "x" + std::to_string(b.height) +
                          " is outside the " + std::to_string(width) + "x" +
                          std::to_string(height) + " frame");
    }
  }
}

LoadedSample load_sample(const SampleRecord& record) {
  LoadedSample s;
  s.depth = read_depth_bin(record.depth_path);
  if (record.rgb_path) s.rgb = read_rgb_sequence(*record.rgb_path);
  if (record.crop_path) {
    s.crops = parse_crop_boxes(text_of(read_file(*record.crop_path)));
    check_crop_boxes(s.crops, s.depth.size(), s.depth.width(), s.depth.height());
  }
  return s;
}

Protocol parse_protocol(std::string_view text) {
  if (text == "cross-subject") return Protocol::cross_subject;
  if (text == "cross-view") return Protocol::cross_view;
  if (text == "one-third") return Protocol::one_third;
  if (text == "two-thirds") return Protocol::two_thirds;
  throw ConfigError("unknown split '" + std::string(text) +
                    "' (expected cross-subject, cross-view, one-third or two-thirds)");
}

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::cross_subject: return "cross-subject";
    case Protocol::cross_view: return "cross-view";
    case Protocol::one_third: return "one-third";
    case Protocol::two_thirds: return "two-thirds";
  }
  return "?";
}

std::string Split::describe() const {
  auto list = [](const std::vector<int>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? " " : "") + std::to_string(ids[i]);
    return s;
  };
  std::string out(to_string(protocol));
  if (!train_ids.empty()) out += " train=[" + list(train_ids) + "]";
  if (!test_ids.empty()) out += " test=[" + list(test_ids) + "]";
  return out;
}

Partition partition(const std::vector<SampleRecord>& records, const Split& split) {
  auto key = [&](const SampleRecord& r) {
    switch (split.protocol) {
      case Protocol::cross_subject: return r.subject;
      case Protocol::cross_view: return r.camera;
      default:
        if (r.repetition < 0) {
          throw ProtocolError(std::string(to_string(split.protocol)) +
                              " split needs repetition indices in the manifest (" +
                              r.depth_path.string() + ")");
        }
        return r.repetition;
    }
  };

  std::set<int> train(split.train_ids.begin(), split.train_ids.end());
  const std::set<int> test(split.test_ids.begin(), split.test_ids.end());
  for (int id : test) {
    if (train.count(id)) {
      throw ProtocolError("split assigns id " + std::to_string(id) + " to both train and test");
    }
  }
  if (train.empty()) {
    std::set<int> ids;
    for (const auto& r : records) ids.insert(key(r));
    std::vector<int> sorted(ids.begin(), ids.end());
    switch (split.protocol) {
      case Protocol::cross_subject:
        for (std::size_t i = 0; i < sorted.size(); i += 2) train.insert(sorted[i]);
        break;
      case Protocol::cross_view:
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) train.insert(sorted[i]);
        break;
      case Protocol::one_third: train.insert(0); break;
      case Protocol::two_thirds: train.insert({0, 1}); break;
    }
    for (int id : test) train.erase(id);
  }

  Partition out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const int id = key(records[i]);
    if (train.count(id)) {
      out.train.push_back(i);
    } else if (test.empty() || test.count(id)) {
      out.test.push_back(i);
    }
  }
  return out;
}

}  // namespace mvdmm
