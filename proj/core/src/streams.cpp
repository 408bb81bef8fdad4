#include "mvdmm/streams.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>

#include "mvdmm/error.hpp"
#include "mvdmm/random.hpp"

namespace mvdmm {

namespace {

// FNV-1a, so a stream's weights depend on its identity rather than its position.
std::uint64_t name_hash(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string stem_of(std::string name) {
  std::replace(name.begin(), name.end(), '/', '_');
  return name;
}

}  // namespace

std::string format_angle(double deg) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, deg);
  return std::string(buf, end);
}

std::string StreamId::name() const {
  if (kind == StreamKind::rgb) return pose + "/rgb/r" + std::to_string(rgb_window);
  return pose + "/dmm/" + std::string(to_string(plane)) + "/w" + window.to_string() + "/a" +
         format_angle(angle_deg);
}

std::string StreamId::file_stem() const { return stem_of(name()); }

std::string ClassifierSlot::name() const {
  if (kind == StreamKind::rgb) return pose + "/rgb/r" + std::to_string(rgb_window);
  const std::string planes = plane ? std::string(to_string(*plane)) : std::string("xyz");
  return pose + "/dmm/" + planes + "/w" + window.to_string() + "/a" + format_angle(angle_deg);
}

std::string ClassifierSlot::file_stem() const { return stem_of(name()); }

std::size_t StreamPlan::dmm_stream_count() const {
  return static_cast<std::size_t>(std::count_if(
      streams.begin(), streams.end(), [](const StreamId& s) { return s.kind == StreamKind::dmm; }));
}

std::size_t StreamPlan::rgb_stream_count() const { return streams.size() - dmm_stream_count(); }

std::size_t expected_stream_count(const PipelineConfig& cfg) {
  return cfg.poses.size() *
         (cfg.planes.size() * cfg.angles.size() * cfg.windows.size() + cfg.rgb_windows.size());
}

StreamPlan build_streams(const PipelineConfig& cfg) {
  validate(cfg);
  StreamPlan plan;
  plan.streams.reserve(expected_stream_count(cfg));
  for (const auto& pose : cfg.poses) {
    for (auto window : cfg.windows) {
      for (double angle : cfg.angles) {
        ClassifierSlot concat{StreamKind::dmm, pose, window, angle, std::nullopt, 0, {}};
        for (auto plane : cfg.planes) {
          plan.streams.push_back({StreamKind::dmm, pose, plane, window, angle, 0});
          const auto index = plan.streams.size() - 1;
          if (cfg.concat_planes) {
            concat.streams.push_back(index);
          } else {
            plan.slots.push_back({StreamKind::dmm, pose, window, angle, plane, 0, {index}});
          }
        }
        if (cfg.concat_planes) {
          if (cfg.planes.size() == 1) concat.plane = cfg.planes.front();
          plan.slots.push_back(std::move(concat));
        }
      }
    }
    for (auto r : cfg.rgb_windows) {
      plan.streams.push_back({StreamKind::rgb, pose, Plane::xy, TemporalWindow{}, 0.0, r});
      plan.slots.push_back(
          {StreamKind::rgb, pose, TemporalWindow{}, 0.0, std::nullopt, r, {plan.streams.size() - 1}});
    }
  }
  return plan;
}

Shape4 stream_input_shape(const PipelineConfig& cfg, const StreamId& id) {
  const std::size_t lambda = id.kind == StreamKind::rgb ? id.rgb_window : cfg.dmm_lambda;
  return {3, lambda, cfg.render_height, cfg.render_width};
}

NetworkSpec stream_network(const PipelineConfig& cfg, const StreamPlan& plan, std::size_t stream) {
  if (stream >= plan.streams.size()) throw ContractError("stream index out of range");
  const auto& id = plan.streams[stream];
  const auto shape = stream_input_shape(cfg, id);
  if (!cfg.weights_dir.empty()) {
    const auto path = std::filesystem::path(cfg.weights_dir) / (id.file_stem() + ".wts");
    if (std::filesystem::exists(path)) {
      auto net = load_weights(path);
      if (!(net.input == shape)) {
        throw FormatError("weights " + path.string() + " expect input " + net.input.to_string() +
                          ", stream " + id.name() + " provides " + shape.to_string());
      }
      return net;
    }
  }
  auto net = cfg.network == NetworkKind::c3d
                 ? c3d_network(shape.d, shape.h, shape.w)
                 : desk_network(shape.d, shape.h, shape.w, cfg.desk);
  initialize_weights(net, derive_seed(cfg.seed, name_hash(id.name())));
  return net;
}

}  // namespace mvdmm
