#include "mvdmm/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <set>
#include <sstream>

#include "mvdmm/error.hpp"
#include "mvdmm/videoio.hpp"

namespace mvdmm {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_list(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError("unterminated list '" + std::string(s) + "'");
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto item = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
    out.push_back(unquote(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw ConfigError("expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t to_uint(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw ConfigError("expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

bool to_bool(std::string_view s) {
  s = trim(s);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("expected true or false, got '" + std::string(s) + "'");
}

std::string fmt(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

template <class T, class F>
std::string fmt_list(const std::vector<T>& items, F&& each) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += each(items[i]);
  }
  return out + "]";
}

struct Key {
  std::string_view section;
  std::string_view name;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

Intrinsics& intrinsics_of(PipelineConfig& c) {
  if (!c.intrinsics) c.intrinsics = Intrinsics{0.0, 0.0, 0.0};
  return *c.intrinsics;
}

const std::vector<Key>& keys() {
  using C = PipelineConfig;
  using S = std::string_view;
  static const std::vector<Key> table{
      {"", "angles", [](C& c, S v) { c.angles = parse_angle_list(v); },
       [](const C& c) { return fmt_list(c.angles, [](double a) { return fmt(a); }); }},
      {"", "pitch", [](C& c, S v) { c.pitch_deg = to_double(v); },
       [](const C& c) { return fmt(c.pitch_deg); }},
      {"", "windows", [](C& c, S v) { c.windows = parse_window_list(v); },
       [](const C& c) {
         return fmt_list(c.windows, [](TemporalWindow w) { return w.to_string(); });
       }},
      {"", "rgb_windows",
       [](C& c, S v) {
         c.rgb_windows.clear();
         for (const auto& s : split_list(v)) c.rgb_windows.push_back(to_uint(s));
       },
       [](const C& c) {
         return fmt_list(c.rgb_windows, [](std::size_t r) { return std::to_string(r); });
       }},
      {"", "planes",
       [](C& c, S v) {
         c.planes.clear();
         for (const auto& s : split_list(v)) c.planes.push_back(parse_plane(s));
       },
       [](const C& c) {
         return fmt_list(c.planes, [](Plane p) { return std::string(to_string(p)); });
       }},
      {"", "poses", [](C& c, S v) { c.poses = split_list(v); },
       [](const C& c) { return fmt_list(c.poses, [](const std::string& p) { return p; }); }},
      {"", "seed", [](C& c, S v) { c.seed = to_uint(v); },
       [](const C& c) { return std::to_string(c.seed); }},
      {"", "workers", [](C& c, S v) { c.workers = to_uint(v); },
       [](const C& c) { return std::to_string(c.workers); }},
      {"render", "height", [](C& c, S v) { c.render_height = to_uint(v); },
       [](const C& c) { return std::to_string(c.render_height); }},
      {"render", "width", [](C& c, S v) { c.render_width = to_uint(v); },
       [](const C& c) { return std::to_string(c.render_width); }},
      {"render", "dmm_lambda", [](C& c, S v) { c.dmm_lambda = to_uint(v); },
       [](const C& c) { return std::to_string(c.dmm_lambda); }},
      {"render", "concat_planes", [](C& c, S v) { c.concat_planes = to_bool(v); },
       [](const C& c) { return fmt(c.concat_planes); }},
      {"render", "rgb_from_depth", [](C& c, S v) { c.rgb_from_depth = to_bool(v); },
       [](const C& c) { return fmt(c.rgb_from_depth); }},
      {"geometry", "focal", [](C& c, S v) { intrinsics_of(c).focal = to_double(v); },
       [](const C& c) { return fmt(c.intrinsics ? c.intrinsics->focal : 0.0); }},
      {"geometry", "cx", [](C& c, S v) { intrinsics_of(c).cx = to_double(v); },
       [](const C& c) { return fmt(c.intrinsics ? c.intrinsics->cx : 0.0); }},
      {"geometry", "cy", [](C& c, S v) { intrinsics_of(c).cy = to_double(v); },
       [](const C& c) { return fmt(c.intrinsics ? c.intrinsics->cy : 0.0); }},
      {"geometry", "pivot_depth_mm", [](C& c, S v) { c.pivot_depth_mm = to_double(v); },
       [](const C& c) { return fmt(c.pivot_depth_mm); }},
      {"geometry", "fill_holes", [](C& c, S v) { c.fill_holes = to_bool(v); },
       [](const C& c) { return fmt(c.fill_holes); }},
      {"bins", "size_mm", [](C& c, S v) { c.bins.bin_size_mm = to_double(v); },
       [](const C& c) { return fmt(c.bins.bin_size_mm); }},
      {"bins", "count", [](C& c, S v) { c.bins.bin_count = to_uint(v); },
       [](const C& c) { return std::to_string(c.bins.bin_count); }},
      {"bins", "origin_mm", [](C& c, S v) { c.bins.origin_mm = to_double(v); },
       [](const C& c) { return fmt(c.bins.origin_mm); }},
      {"flow", "enabled", [](C& c, S v) { c.flow_weights = to_bool(v); },
       [](const C& c) { return fmt(c.flow_weights); }},
      {"flow", "iterations", [](C& c, S v) { c.flow.iterations = static_cast<int>(to_uint(v)); },
       [](const C& c) { return std::to_string(c.flow.iterations); }},
      {"flow", "smoothness", [](C& c, S v) { c.flow.smoothness = to_double(v); },
       [](const C& c) { return fmt(c.flow.smoothness); }},
      {"flow", "normalization",
       [](C& c, S v) { c.normalization = parse_normalization(unquote(v)); },
       [](const C& c) { return std::string(to_string(c.normalization)); }},
      {"dmm", "noise_floor", [](C& c, S v) { c.dmm.noise_floor = to_double(v); },
       [](const C& c) { return fmt(c.dmm.noise_floor); }},
      {"network", "kind", [](C& c, S v) { c.network = parse_network_kind(unquote(v)); },
       [](const C& c) { return std::string(to_string(c.network)); }},
      {"network", "conv1_maps", [](C& c, S v) { c.desk.conv1_maps = to_uint(v); },
       [](const C& c) { return std::to_string(c.desk.conv1_maps); }},
      {"network", "conv2_maps", [](C& c, S v) { c.desk.conv2_maps = to_uint(v); },
       [](const C& c) { return std::to_string(c.desk.conv2_maps); }},
      {"network", "fc_units", [](C& c, S v) { c.desk.fc_units = to_uint(v); },
       [](const C& c) { return std::to_string(c.desk.fc_units); }},
      {"network", "weights_dir", [](C& c, S v) { c.weights_dir = unquote(v); },
       [](const C& c) { return "\"" + c.weights_dir + "\""; }},
      {"pca", "enabled", [](C& c, S v) { c.pca = to_bool(v); },
       [](const C& c) { return fmt(c.pca); }},
      {"pca", "variance", [](C& c, S v) { c.pca_target.variance = to_double(v); },
       [](const C& c) { return fmt(c.pca_target.variance); }},
      {"pca", "components", [](C& c, S v) { c.pca_target.fixed_k = to_uint(v); },
       [](const C& c) { return std::to_string(c.pca_target.fixed_k); }},
      {"pca", "whiten", [](C& c, S v) { c.pca_whiten = to_bool(v); },
       [](const C& c) { return fmt(c.pca_whiten); }},
      {"svm", "lambda", [](C& c, S v) { c.svm.lambda = to_double(v); },
       [](const C& c) { return fmt(c.svm.lambda); }},
      {"svm", "epochs", [](C& c, S v) { c.svm.epochs = to_uint(v); },
       [](const C& c) { return std::to_string(c.svm.epochs); }},
      {"svm", "seed", [](C& c, S v) { c.svm.seed = to_uint(v); },
       [](const C& c) { return std::to_string(c.svm.seed); }},
      {"fusion", "score_mode", [](C& c, S v) { c.score_mode = parse_score_mode(unquote(v)); },
       [](const C& c) { return std::string(to_string(c.score_mode)); }},
  };
  return table;
}

}  // namespace

NetworkKind parse_network_kind(std::string_view text) {
  if (text == "c3d") return NetworkKind::c3d;
  if (text == "desk") return NetworkKind::desk;
  throw ConfigError("unknown network kind '" + std::string(text) + "' (expected c3d or desk)");
}

std::string_view to_string(NetworkKind kind) { return kind == NetworkKind::c3d ? "c3d" : "desk"; }

std::vector<double> parse_angle_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(to_double(s));
  return out;
}

std::vector<TemporalWindow> parse_window_list(std::string_view text) {
  std::vector<TemporalWindow> out;
  for (const auto& s : split_list(text)) out.push_back(TemporalWindow::parse(trim(s)));
  return out;
}

void validate(const PipelineConfig& cfg) {
  if (cfg.angles.empty()) throw ConfigError("config: no view angles");
  if (cfg.windows.empty()) throw ConfigError("config: no temporal windows");
  if (cfg.planes.empty()) throw ConfigError("config: no projection planes");
  if (cfg.poses.empty()) throw ConfigError("config: no poses");
  for (double a : cfg.angles) {
    if (!(a >= -180.0 && a <= 180.0)) throw ConfigError("config: angle " + fmt(a) + " outside [-180, 180]");
  }
  if (!(cfg.pitch_deg >= -180.0 && cfg.pitch_deg <= 180.0)) {
    throw ConfigError("config: pitch outside [-180, 180]");
  }
  auto unique = [](auto items) {
    std::sort(items.begin(), items.end());
    return std::adjacent_find(items.begin(), items.end()) == items.end();
  };
  if (!unique(cfg.angles) || !unique(cfg.windows) || !unique(cfg.planes) || !unique(cfg.poses) ||
      !unique(cfg.rgb_windows)) {
    throw ConfigError("config: duplicate entries in a stream list");
  }
  for (auto w : cfg.windows) {
    if (!w.is_all() && w.frames < 2) throw ConfigError("config: windows must be >= 2 or ALL");
  }
  for (auto r : cfg.rgb_windows) {
    if (r < 1) throw ConfigError("config: rgb windows must be positive");
  }
  for (const auto& p : cfg.poses) {
    if (p.empty() || p.find_first_of(" \t/,[]\"") != std::string::npos) {
      throw ConfigError("config: invalid pose name '" + p + "'");
    }
  }
  if (cfg.render_height < 8 || cfg.render_width < 8) {
    throw ConfigError("config: render size must be at least 8x8");
  }
  if (cfg.dmm_lambda < 1) throw ConfigError("config: dmm_lambda must be positive");
  if (!(cfg.bins.bin_size_mm > 0.0) || cfg.bins.bin_count == 0) {
    throw ConfigError("config: depth bins must have positive size and count");
  }
  if (cfg.flow.iterations < 1 || cfg.flow.smoothness < 0.0) {
    throw ConfigError("config: invalid flow parameters");
  }
  if (cfg.pca_target.fixed_k == 0 &&
      !(cfg.pca_target.variance > 0.0 && cfg.pca_target.variance <= 1.0)) {
    throw ConfigError("config: pca variance must lie in (0, 1]");
  }
  if (!(cfg.svm.lambda > 0.0) || cfg.svm.epochs == 0) {
    throw ConfigError("config: svm lambda and epochs must be positive");
  }
  if (cfg.workers == 0) throw ConfigError("config: workers must be at least 1");
}

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto where = " (line " + std::to_string(line_no) + ")";
    if (line.front() == '[' && line.find('=') == std::string_view::npos) {
      if (line.back() != ']') throw ConfigError("config: malformed section header" + where);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("config: expected key = value" + where);
    const auto name = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const Key* key = nullptr;
    for (const auto& k : keys()) {
      if (k.section == section && k.name == name) key = &k;
    }
    const auto full = section.empty() ? std::string(name) : section + "." + std::string(name);
    if (!key) throw ConfigError("config: unknown key '" + full + "'" + where);
    if (!seen.insert(full).second) throw ConfigError("config: duplicate key '" + full + "'" + where);
    try {
      key->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config: ") + full + ": " + e.what() + where);
    }
  }
  if (cfg.intrinsics && !(cfg.intrinsics->focal > 0.0)) cfg.intrinsics.reset();
  validate(cfg);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string format_config(const PipelineConfig& cfg) {
  std::string out;
  std::string_view section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      section = k.section;
      out += "\n[" + std::string(section) + "]\n";
    }
    out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  }
  return out;
}

void save_config(const PipelineConfig& cfg, const std::filesystem::path& path) {
  const auto text = format_config(cfg);
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

}  // namespace mvdmm
