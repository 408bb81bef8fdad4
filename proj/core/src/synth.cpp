#include "mvdmm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mvdmm/error.hpp"
#include "mvdmm/random.hpp"

namespace mvdmm {

namespace {

enum class Motion { translate, oscillate, arc, push, still };

Motion motion_of(const std::string& name) {
  if (name == "translate") return Motion::translate;
  if (name == "oscillate") return Motion::oscillate;
  if (name == "arc") return Motion::arc;
  if (name == "push") return Motion::push;
  if (name == "static") return Motion::still;
  throw ConfigError("unknown synthetic action '" + name +
                    "' (expected translate, oscillate, arc, push or static)");
}

void check(const SynthSpec& spec) {
  if (spec.actions.size() < 2) throw ContractError("synthetic dataset needs at least 2 actions");
  if (spec.subjects < 2) throw ContractError("synthetic dataset needs at least 2 subjects");
  if (spec.cameras < 1 || spec.repetitions < 1 || spec.frames < 2) {
    throw ContractError("synthetic dataset needs cameras, repetitions and >= 2 frames");
  }
  if (spec.width < 8 || spec.height < 8) throw ContractError("synthetic frames must be >= 8x8");
  for (const auto& a : spec.actions) motion_of(a);
}

SceneBox box_at(const Point3& c, double sx, double sy, double sz, Rgb color) {
  return {{c.x - sx / 2, c.y - sy / 2, c.z - sz / 2}, {c.x + sx / 2, c.y + sy / 2, c.z + sz / 2},
          color};
}

// Nearest positive hit distance of a ray against a box, or infinity.
double intersect(const Point3& o, const Point3& d, const SceneBox& b) {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  const double os[3] = {o.x, o.y, o.z};
  const double ds[3] = {d.x, d.y, d.z};
  const double lo[3] = {b.lo.x, b.lo.y, b.lo.z};
  const double hi[3] = {b.hi.x, b.hi.y, b.hi.z};
  for (int k = 0; k < 3; ++k) {
    if (ds[k] == 0.0) {
      if (os[k] < lo[k] || os[k] > hi[k]) return std::numeric_limits<double>::infinity();
      continue;
    }
    double a = (lo[k] - os[k]) / ds[k];
    double c = (hi[k] - os[k]) / ds[k];
    if (a > c) std::swap(a, c);
    t0 = std::max(t0, a);
    t1 = std::min(t1, c);
    if (t0 > t1) return std::numeric_limits<double>::infinity();
  }
  return t0 > 0.0 ? t0 : std::numeric_limits<double>::infinity();
}

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  const SceneBox* box = nullptr;
  Point3 at;
};

// Casts the ray of pixel (u, v) for a camera yawed about the pivot.
template <class F>
void cast(const SceneFrame& scene, const SynthSpec& spec, double yaw_deg, F&& on_pixel) {
  const auto K = Intrinsics::for_frame(spec.width, spec.height);
  const auto R = rotation_matrix({yaw_deg, 0.0});
  const Point3 pivot{0.0, 0.0, spec.pivot_depth_mm};
  // Camera -> scene: p = R^T (q - pivot) + pivot.
  auto to_scene = [&](const Point3& q, bool direction) {
    const Point3 r = direction ? q : Point3{q.x - pivot.x, q.y - pivot.y, q.z - pivot.z};
    Point3 p{R[0] * r.x + R[3] * r.y + R[6] * r.z, R[1] * r.x + R[4] * r.y + R[7] * r.z,
             R[2] * r.x + R[5] * r.y + R[8] * r.z};
    if (!direction) p = {p.x + pivot.x, p.y + pivot.y, p.z + pivot.z};
    return p;
  };
  const Point3 origin = to_scene({0.0, 0.0, 0.0}, false);
  for (std::size_t v = 0; v < spec.height; ++v) {
    for (std::size_t u = 0; u < spec.width; ++u) {
      // Camera-frame direction with unit z, so the hit distance equals depth.
      const Point3 dc{(static_cast<double>(u) - K.cx) / K.focal,
                      (static_cast<double>(v) - K.cy) / K.focal, 1.0};
      const Point3 d = to_scene(dc, true);
      Hit hit;
      for (const auto& b : scene) {
        const double t = intersect(origin, d, b);
        if (t < hit.t) {
          hit.t = t;
          hit.box = &b;
        }
      }
      if (hit.box) hit.at = {origin.x + hit.t * d.x, origin.y + hit.t * d.y, origin.z + hit.t * d.z};
      on_pixel(u, v, hit);
    }
  }
}

std::uint8_t channel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

double camera_yaw_deg(const SynthSpec& spec, std::size_t camera) {
  return spec.camera_step_deg * static_cast<double>(camera) -
         spec.camera_step_deg * static_cast<double>(spec.cameras - 1) / 2.0;
}

std::vector<SceneFrame> synthetic_scene(const SynthSpec& spec, std::size_t action,
                                        std::size_t subject, std::size_t repetition,
                                        std::uint64_t seed) {
  check(spec);
  if (action >= spec.actions.size()) throw ContractError("synthetic action index out of range");
  const auto motion = motion_of(spec.actions[action]);
  const double j = spec.jitter;

  // Traits shared by every take of a subject.
  Engine person(derive_seed(seed, 1000 + subject));
  const double x0 = uniform(person, -150.0, 150.0) * j / 0.25;
  const double torso_w = 360.0 * uniform(person, 1.0 - j / 2, 1.0 + j / 2);
  const double torso_h = 700.0 * uniform(person, 1.0 - j / 2, 1.0 + j / 2);
  const double person_speed = uniform(person, 1.0 - j, 1.0 + j);
  const double person_amp = uniform(person, 1.0 - j, 1.0 + j);

  // Per-take variation.
  Engine take(derive_seed(seed, (action * 1000 + subject) * 1000 + repetition));
  const double speed = person_speed * uniform(take, 1.0 - j / 2, 1.0 + j / 2);
  const double amp = person_amp * uniform(take, 1.0 - j / 2, 1.0 + j / 2);
  const double phase = uniform(take, -0.25, 0.25) * j / 0.25;
  const double lift = uniform(take, -80.0, 80.0) * j / 0.25;

  const double z0 = spec.pivot_depth_mm;
  const double limb_z = z0 - 120.0 - 110.0;
  const Rgb shirt{70, 90, 150};
  const Rgb skin{224, 172, 140};
  const Rgb glove{230, 60, 40};
  const Rgb wall{150, 150, 160};

  std::vector<SceneFrame> frames;
  frames.reserve(spec.frames);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    const double s = static_cast<double>(f) / static_cast<double>(spec.frames - 1);
    const double pi = std::numbers::pi;
    Point3 limb{x0 + 260.0, -120.0 + lift, limb_z};
    switch (motion) {
      case Motion::translate:
        limb.x = x0 + 380.0 * amp * std::sin(pi * (speed * s - 0.5 + phase) * 0.9);
        break;
      case Motion::oscillate:
        limb.y = -120.0 + lift + 260.0 * amp * std::sin(2.0 * pi * (1.5 * speed * s + phase));
        break;
      case Motion::arc: {
        const double phi = pi * std::clamp(speed * s + phase * 0.5, 0.0, 1.0);
        limb.x = x0 + 360.0 * amp * std::cos(phi);
        limb.z = limb_z - 360.0 * amp * std::sin(phi);
        break;
      }
      case Motion::push:
        limb.x = x0 + 150.0;
        limb.z = limb_z - 500.0 * amp * std::sin(pi * std::clamp(speed * s + phase * 0.5, 0.0, 1.0));
        break;
      case Motion::still: break;
    }
    SceneFrame frame;
    frame.push_back({{-4000.0, -3000.0, 3000.0}, {4000.0, 3000.0, 3100.0}, wall});
    frame.push_back(box_at({x0, 0.0, z0}, torso_w, torso_h, 240.0, shirt));
    frame.push_back(box_at({x0, -torso_h / 2 - 100.0, z0}, 180.0, 200.0, 180.0, skin));
    frame.push_back(box_at(limb, 150.0, 150.0, 150.0, glove));
    frames.push_back(std::move(frame));
  }
  return frames;
}

DepthFrame render_depth(const SceneFrame& scene, const SynthSpec& spec, double yaw_deg,
                        std::uint64_t noise_seed) {
  DepthFrame out{Grid<std::uint32_t>(spec.width, spec.height), 0};
  Engine rng(noise_seed);
  cast(scene, spec, yaw_deg, [&](std::size_t u, std::size_t v, const Hit& hit) {
    if (!hit.box) return;
    double z = hit.t;
    if (noise_seed != 0 && spec.depth_noise_mm > 0.0) z += spec.depth_noise_mm * normal(rng);
    out.depth(u, v) = static_cast<std::uint32_t>(std::max(1L, std::lround(z)));
  });
  return out;
}

ColorImage render_rgb(const SceneFrame& scene, const SynthSpec& spec, double yaw_deg,
                      std::uint64_t noise_seed) {
  ColorImage out(spec.width, spec.height);
  Engine rng(noise_seed);
  cast(scene, spec, yaw_deg, [&](std::size_t u, std::size_t v, const Hit& hit) {
    if (!hit.box) return;
    // 100 mm checker texture fixed to scene coordinates.
    const auto cell = [](double c) { return static_cast<long>(std::floor(c / 100.0)); };
    const bool dark = ((cell(hit.at.x) + cell(hit.at.y) + cell(hit.at.z)) & 1) != 0;
    const double shade = dark ? 0.7 : 1.0;
    auto tone = [&](std::uint8_t c) {
      double value = shade * c;
      if (noise_seed != 0 && spec.rgb_noise > 0.0) value += spec.rgb_noise * normal(rng);
      return channel(value);
    };
    const auto& c = hit.box->color;
    out(u, v) = {tone(c.r), tone(c.g), tone(c.b)};
  });
  return out;
}

LoadedSample synthesize_sample(const SynthSpec& spec, std::size_t action, std::size_t subject,
                               std::size_t camera, std::size_t repetition, std::uint64_t seed) {
  if (camera >= spec.cameras) throw ContractError("synthetic camera index out of range");
  const auto scene = synthetic_scene(spec, action, subject, repetition, seed);
  const double yaw = camera_yaw_deg(spec, camera);
  const std::uint64_t take =
      derive_seed(seed, ((action * 1000 + subject) * 1000 + repetition) * 1000 + camera + 1);
  LoadedSample out;
  for (std::size_t f = 0; f < scene.size(); ++f) {
    auto depth = render_depth(scene[f], spec, yaw, derive_seed(take, 2 * f) | 1);
    depth.index = f;
    out.depth.frames.push_back(std::move(depth));
  }
  if (spec.rgb) {
    RgbSequence rgb;
    for (std::size_t f = 0; f < scene.size(); ++f) {
      rgb.frames.push_back({render_rgb(scene[f], spec, yaw, derive_seed(take, 2 * f + 1) | 1), f});
    }
    out.rgb = std::move(rgb);
  }
  return out;
}

std::vector<SampleRecord> generate_synthetic_dataset(const SynthSpec& spec, std::uint64_t seed,
                                                     const std::filesystem::path& out_dir) {
  check(spec);
  std::filesystem::create_directories(out_dir / "samples");
  std::vector<SampleRecord> records;
  for (std::size_t a = 0; a < spec.actions.size(); ++a) {
    for (std::size_t s = 0; s < spec.subjects; ++s) {
      for (std::size_t c = 0; c < spec.cameras; ++c) {
        for (std::size_t r = 0; r < spec.repetitions; ++r) {
          const auto sample = synthesize_sample(spec, a, s, c, r, seed);
          const auto dir = out_dir / "samples" /
                           ("a" + std::to_string(a) + "_s" + std::to_string(s) + "_c" +
                            std::to_string(c) + "_r" + std::to_string(r));
          std::filesystem::create_directories(dir);
          SampleRecord rec;
          rec.depth_path = dir / "depth.bin";
          write_depth_bin(sample.depth, rec.depth_path);
          if (sample.rgb) {
            rec.rgb_path = dir / "rgb";
            write_rgb_sequence(*sample.rgb, *rec.rgb_path);
          }
          rec.label = spec.actions[a];
          rec.subject = static_cast<int>(s);
          rec.camera = static_cast<int>(c);
          rec.pose = spec.pose;
          rec.repetition = static_cast<int>(r);
          records.push_back(std::move(rec));
        }
      }
    }
  }
  write_manifest(records, out_dir / "manifest.tsv");
  return records;
}

PipelineConfig desk_pipeline_config(const SynthSpec& spec) {
  PipelineConfig cfg;
  cfg.angles = {-30.0, 0.0, 30.0};
  cfg.windows = {TemporalWindow::of(5), TemporalWindow::all()};
  cfg.rgb_windows = {10, 16};
  cfg.poses = {spec.pose};
  cfg.render_height = 32;
  cfg.render_width = 32;
  cfg.dmm_lambda = 16;
  cfg.pivot_depth_mm = spec.pivot_depth_mm;
  cfg.bins = {50.0, 50, 1000.0};
  cfg.network = NetworkKind::desk;
  return cfg;
}

}  // namespace mvdmm
