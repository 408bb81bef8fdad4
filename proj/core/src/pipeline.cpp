#include "mvdmm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "mvdmm/error.hpp"

namespace mvdmm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(i) for i in [0, n) on up to `workers` threads; rethrows the first failure.
template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string sample_id(const SampleRecord& r) {
  std::string id = r.label + "_s" + std::to_string(r.subject) + "_c" + std::to_string(r.camera);
  if (r.repetition >= 0) id += "_r" + std::to_string(r.repetition);
  return id;
}

const CropBox* box_for(const LoadedSample& s, std::size_t frame) {
  if (s.crops.empty()) return nullptr;
  return s.crops.size() == 1 ? &s.crops.front() : &s.crops[frame];
}

template <class T>
void mask_outside(Grid<T>& grid, CropBox box, std::size_t src_w, std::size_t src_h, T fill) {
  if (grid.width != src_w || grid.height != src_h) {
    // Scale the box to a differently sized stream of the same scene.
    const double sx = static_cast<double>(grid.width) / static_cast<double>(src_w);
    const double sy = static_cast<double>(grid.height) / static_cast<double>(src_h);
    const auto x1 = static_cast<std::size_t>(std::lround((box.x + box.width) * sx));
    const auto y1 = static_cast<std::size_t>(std::lround((box.y + box.height) * sy));
    box.x = static_cast<std::size_t>(std::lround(box.x * sx));
    box.y = static_cast<std::size_t>(std::lround(box.y * sy));
    box.width = std::min(x1, grid.width) - std::min(box.x, x1);
    box.height = std::min(y1, grid.height) - std::min(box.y, y1);
  }
  for (std::size_t y = 0; y < grid.height; ++y) {
    for (std::size_t x = 0; x < grid.width; ++x) {
      const bool inside =
          x >= box.x && x < box.x + box.width && y >= box.y && y < box.y + box.height;
      if (!inside) grid(x, y) = fill;
    }
  }
}

DepthSequence cropped_depth(const LoadedSample& s) {
  DepthSequence out = s.depth;
  for (std::size_t f = 0; f < out.size(); ++f) {
    if (const auto* box = box_for(s, f)) {
      mask_outside(out.frames[f].depth, *box, s.depth.width(), s.depth.height(), std::uint32_t{0});
    }
  }
  return out;
}

double median_depth(const DepthFrame& frame) {
  std::vector<std::uint32_t> values;
  for (auto d : frame.depth.data) {
    if (d) values.push_back(d);
  }
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

Intrinsics intrinsics_for(const PipelineConfig& cfg, const DepthSequence& seq) {
  return cfg.intrinsics ? *cfg.intrinsics : Intrinsics::for_frame(seq.width(), seq.height());
}

std::size_t stream_lambda(const PipelineConfig& cfg, const StreamId& id) {
  return id.kind == StreamKind::rgb ? id.rgb_window : cfg.dmm_lambda;
}

std::vector<ColorImage> fit_all(const std::vector<ColorImage>& frames, const PipelineConfig& cfg) {
  std::vector<ColorImage> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(fit_to_canvas(f, cfg.render_height, cfg.render_width));
  return out;
}

std::vector<ColorImage> rgb_source(const LoadedSample& s, const PipelineConfig& cfg) {
  std::vector<ColorImage> frames;
  if (cfg.rgb_from_depth) {
    const auto depth = cropped_depth(s);
    for (const auto& f : depth.frames) {
      ScalarGrid g(f.width(), f.height());
      std::copy(f.depth.data.begin(), f.depth.data.end(), g.data.begin());
      frames.push_back(colorize(g));
    }
  } else if (s.rgb) {
    for (std::size_t f = 0; f < s.rgb->size(); ++f) {
      ColorImage img = s.rgb->frames[f].pixels;
      const auto* box = f < s.depth.size() ? box_for(s, f) : nullptr;
      if (box) mask_outside(img, *box, s.depth.width(), s.depth.height(), Rgb{0, 0, 0});
      frames.push_back(std::move(img));
    }
  }
  return fit_all(frames, cfg);
}

// Rows of one slot for one sample: the concatenated features of every clip.
std::optional<std::vector<FeatureVector>> slot_rows(const PreparedSample& sample,
                                                    const ClassifierSlot& slot,
                                                    const std::vector<std::shared_ptr<const NetworkSpec>>& nets,
                                                    const PipelineConfig& cfg,
                                                    const StreamPlan& plan) {
  std::vector<std::vector<FeatureVector>> per_stream;
  for (std::size_t k = 0; k < slot.streams.size(); ++k) {
    const auto s = slot.streams[k];
    if (!sample.present[s]) return std::nullopt;
    per_stream.push_back(stream_features(sample, s, *nets[k], cfg, plan));
  }
  std::size_t clips = per_stream.front().size();
  for (const auto& f : per_stream) clips = std::min(clips, f.size());
  if (clips == 0) return std::nullopt;
  std::vector<FeatureVector> rows;
  for (std::size_t c = 0; c < clips; ++c) {
    std::vector<FeatureVector> parts;
    for (const auto& f : per_stream) parts.push_back(f[c]);
    rows.push_back(parts.size() == 1 ? std::move(parts.front()) : concat_features(parts));
  }
  return rows;
}

std::vector<std::shared_ptr<const NetworkSpec>> slot_networks(const ClassifierSlot& slot,
                                                              NetworkBank& bank) {
  std::vector<std::shared_ptr<const NetworkSpec>> out;
  for (auto s : slot.streams) out.push_back(bank.get(s));
  return out;
}

// Mean of the clip scores, spread over the global class list.
ScoreVector slot_score(const ClassifierModel& model, const std::vector<FeatureVector>& rows,
                       std::size_t classes, ScoreMode mode) {
  std::vector<ScoreVector> clips;
  for (const auto& row : rows) {
    const auto v = classifier_input(model, row.values);
    const auto local = svm_score(model.svm, v, mode);
    ScoreVector global{std::vector<double>(classes, 0.0), local.normalized};
    for (std::size_t c = 0; c < model.svm.classes(); ++c) {
      global.values[static_cast<std::size_t>(model.svm.labels[c])] = local.values[c];
    }
    clips.push_back(std::move(global));
  }
  return fuse_scores(clips);
}

std::size_t class_index(const std::vector<std::string>& classes, const std::string& label) {
  const auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) {
    throw ProtocolError("label '" + label + "' is not one of the trained classes");
  }
  return static_cast<std::size_t>(it - classes.begin());
}

std::string text_of(const std::vector<std::uint8_t>& bytes) {
  return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

DepthSequence synthesized_sequence(const LoadedSample& sample, double angle_deg,
                                   const PipelineConfig& cfg) {
  validate(sample.depth);
  check_crop_boxes(sample.crops, sample.depth.size(), sample.depth.width(), sample.depth.height());
  auto seq = cropped_depth(sample);
  if (seq.empty()) return seq;
  const auto K = intrinsics_for(cfg, seq);
  const double pivot_z =
      cfg.pivot_depth_mm > 0.0 ? cfg.pivot_depth_mm : median_depth(seq.frames.front());
  const Point3 pivot{0.0, 0.0, pivot_z};
  const RotationSpec spec{angle_deg, cfg.pitch_deg};
  for (auto& frame : seq.frames) {
    const auto index = frame.index;
    frame = synthesize_view(frame, K, spec, pivot, {cfg.fill_holes});
    frame.index = index;
  }
  return seq;
}

PreparedSample prepare_sample(const LoadedSample& sample, const std::string& pose,
                              const PipelineConfig& cfg, const StreamPlan& plan) {
  if (std::find(cfg.poses.begin(), cfg.poses.end(), pose) == cfg.poses.end()) {
    throw ContractError("pose '" + pose + "' is not a configured pose bank");
  }
  PreparedSample out;
  out.pose = pose;
  out.images.resize(plan.streams.size());
  out.present.assign(plan.streams.size(), false);

  std::vector<std::size_t> dmm;
  std::vector<std::size_t> rgb;
  for (std::size_t i = 0; i < plan.streams.size(); ++i) {
    if (plan.streams[i].pose != pose) continue;
    (plan.streams[i].kind == StreamKind::dmm ? dmm : rgb).push_back(i);
  }

  std::vector<double> angles;
  for (auto i : dmm) {
    if (std::find(angles.begin(), angles.end(), plan.streams[i].angle_deg) == angles.end()) {
      angles.push_back(plan.streams[i].angle_deg);
    }
  }
  for (double angle : angles) {
    const auto seq = synthesized_sequence(sample, angle, cfg);
    std::array<std::vector<ProjectedMap>, 3> maps;
    for (const auto& frame : seq.frames) {
      auto projected = project_cartesian(frame, cfg.bins, angle);
      for (std::size_t p = 0; p < 3; ++p) maps[p].push_back(std::move(projected[p]));
    }
    for (auto plane : kAllPlanes) {
      const auto p = static_cast<std::size_t>(plane);
      std::vector<std::size_t> here;
      for (auto i : dmm) {
        if (plan.streams[i].angle_deg == angle && plan.streams[i].plane == plane) here.push_back(i);
      }
      if (here.empty()) continue;
      std::vector<MagnitudeMap> weights;
      if (cfg.flow_weights && maps[p].size() >= 2) {
        std::vector<ScalarGrid> grids;
        for (const auto& m : maps[p]) grids.push_back(m.grid);
        weights = motion_weights(grids, cfg.flow, cfg.normalization);
      }
      for (auto i : here) {
        const auto& id = plan.streams[i];
        if (template_count(maps[p].size(), id.window) == 0) {
          out.warnings.push_back(id.name() + ": " + std::to_string(maps[p].size()) +
                                 " frames are too few for window " + id.window.to_string());
          continue;
        }
        const auto templates = template_stream(maps[p], weights, id.window, cfg.dmm);
        if (templates.size() < cfg.dmm_lambda) {
          out.warnings.push_back(id.name() + ": " + std::to_string(templates.size()) +
                                 " templates are fewer than the clip length " +
                                 std::to_string(cfg.dmm_lambda));
          continue;
        }
        auto& images = out.images[i];
        images.reserve(templates.size());
        for (const auto& t : templates) {
          images.push_back(render_template(t, cfg.render_height, cfg.render_width));
        }
        out.present[i] = true;
      }
    }
  }

  if (!rgb.empty()) {
    const auto frames = rgb_source(sample, cfg);
    for (auto i : rgb) {
      const auto& id = plan.streams[i];
      if (frames.empty()) {
        out.warnings.push_back(id.name() + ": no RGB frames");
      } else if (frames.size() < id.rgb_window) {
        out.warnings.push_back(id.name() + ": " + std::to_string(frames.size()) +
                               " frames are fewer than the clip length " +
                               std::to_string(id.rgb_window));
      } else {
        out.images[i] = frames;
        out.present[i] = true;
      }
    }
  }
  return out;
}

std::vector<FeatureVector> stream_features(const PreparedSample& sample, std::size_t stream,
                                           const NetworkSpec& net, const PipelineConfig& cfg,
                                           const StreamPlan& plan) {
  const auto& id = plan.streams.at(stream);
  std::vector<FeatureVector> out;
  if (!sample.present.at(stream)) return out;
  const auto& images = sample.images[stream];
  const auto lambda = stream_lambda(cfg, id);
  for (auto end : clip_ends(images.size(), lambda)) {
    auto f = extract_features(stack_clip(images, end, lambda), net);
    f.provenance.stream = id.name();
    f.provenance.pose = id.pose;
    if (id.kind == StreamKind::dmm) {
      f.provenance.plane = id.plane;
      f.provenance.window = id.window;
      f.provenance.angle_deg = id.angle_deg;
    }
    f.provenance.clip_end = end;
    out.push_back(std::move(f));
  }
  return out;
}

NetworkBank::NetworkBank(PipelineConfig cfg, StreamPlan plan)
    : cfg_(std::move(cfg)), plan_(std::move(plan)) {}

std::shared_ptr<const NetworkSpec> NetworkBank::get(std::size_t stream) {
  {
    std::lock_guard lock(mutex_);
    if (const auto it = nets_.find(stream); it != nets_.end()) return it->second;
  }
  auto net = std::make_shared<const NetworkSpec>(stream_network(cfg_, plan_, stream));
  std::lock_guard lock(mutex_);
  return nets_.try_emplace(stream, std::move(net)).first->second;
}

void NetworkBank::release(std::size_t stream) {
  std::lock_guard lock(mutex_);
  nets_.erase(stream);
}

SampleFeatures extract_sample(const LoadedSample& sample, const std::string& pose,
                              const PipelineConfig& cfg, const StreamPlan& plan,
                              NetworkBank& nets) {
  const auto prepared = prepare_sample(sample, pose, cfg, plan);
  SampleFeatures out;
  out.streams.resize(plan.streams.size());
  out.warnings = prepared.warnings;
  for (std::size_t i = 0; i < plan.streams.size(); ++i) {
    if (!prepared.present[i]) continue;
    out.streams[i] = stream_features(prepared, i, *nets.get(i), cfg, plan);
  }
  return out;
}

SampleFeatures extract_sample(const SampleRecord& record, const PipelineConfig& cfg,
                              const StreamPlan& plan, NetworkBank& nets) {
  return extract_sample(load_sample(record), record.pose, cfg, plan, nets);
}

FeatureVector concat_features(std::span<const FeatureVector> parts) {
  if (parts.empty()) throw ContractError("concat_features: nothing to join");
  FeatureVector out;
  out.provenance = parts.front().provenance;
  if (parts.size() > 1) out.provenance.plane.reset();
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& p = parts[k].provenance;
    const auto& q = parts.front().provenance;
    if (p.pose != q.pose || p.window != q.window || p.angle_deg != q.angle_deg ||
        p.clip_end != q.clip_end) {
      throw ContractError("concat_features: " + p.stream + " does not match " + q.stream +
                          " in pose, window, angle or clip");
    }
    if (k > 0) out.provenance.stream += "+" + p.stream;
    out.values.insert(out.values.end(), parts[k].values.begin(), parts[k].values.end());
  }
  return out;
}

bool TrainedPlan::trained() const {
  return std::any_of(models.begin(), models.end(), [](const auto& m) { return m.has_value(); });
}

TrainedPlan train(const std::vector<SampleRecord>& records, const Split& split,
                  const PipelineConfig& cfg, const SampleLoader& loader) {
  TrainedPlan result;
  result.config = cfg;
  result.plan = build_streams(cfg);
  const auto& plan = result.plan;

  const auto part = partition(records, split);
  if (part.train.empty()) throw ProtocolError("split " + split.describe() + " leaves no training data");
  std::set<std::string> labels;
  for (const auto& r : records) {
    labels.insert(r.label);
    if (std::find(cfg.poses.begin(), cfg.poses.end(), r.pose) == cfg.poses.end()) {
      throw ProtocolError("sample " + sample_id(r) + " has pose '" + r.pose +
                          "', which is not a configured pose bank");
    }
  }
  result.classes.assign(labels.begin(), labels.end());
  std::set<std::string> trained_labels;
  for (auto i : part.train) trained_labels.insert(records[i].label);
  for (const auto& l : result.classes) {
    if (!trained_labels.count(l)) {
      throw ProtocolError("class '" + l + "' is absent from the training side of " + split.describe());
    }
  }

  std::vector<PreparedSample> prepared(part.train.size());
  parallel_for(part.train.size(), cfg.workers, [&](std::size_t k) {
    const auto& rec = records[part.train[k]];
    prepared[k] = prepare_sample(loader(rec), rec.pose, cfg, plan);
  });

  result.models.assign(plan.slots.size(), std::nullopt);
  result.train_accuracy.assign(plan.slots.size(), kNaN);
  NetworkBank bank(cfg, plan);
  parallel_for(plan.slots.size(), cfg.workers, [&](std::size_t s) {
    const auto& slot = plan.slots[s];
    const auto nets = slot_networks(slot, bank);
    std::vector<std::vector<double>> rows;
    std::vector<int> row_labels;
    std::vector<std::pair<std::size_t, std::size_t>> sample_rows;  // (truth, row count)
    for (std::size_t k = 0; k < prepared.size(); ++k) {
      if (prepared[k].pose != slot.pose) continue;
      auto feats = slot_rows(prepared[k], slot, nets, cfg, plan);
      if (!feats) continue;
      const auto truth = class_index(result.classes, records[part.train[k]].label);
      sample_rows.emplace_back(truth, feats->size());
      for (auto& f : *feats) {
        rows.push_back(std::move(f.values));
        row_labels.push_back(static_cast<int>(truth));
      }
    }
    for (auto i : slot.streams) bank.release(i);
    if (rows.empty()) return;
    if (std::set<int>(row_labels.begin(), row_labels.end()).size() < 2) {
      throw ProtocolError("slot " + slot.name() + " sees a single class in training");
    }

    ClassifierModel model;
    if (cfg.pca) {
      try {
        model.pca = pca_fit(rows, cfg.pca_target);
      } catch (const RankError& e) {
        throw RankError("slot " + slot.name() + ": " + e.what());
      }
      model.whiten = cfg.pca_whiten;
      for (auto& r : rows) r = classifier_input(model, r);
    }
    model.svm = svm_train(rows, row_labels, cfg.svm);

    std::size_t correct = 0;
    std::size_t offset = 0;
    for (const auto& [truth, count] : sample_rows) {
      std::vector<ScoreVector> clips;
      for (std::size_t r = offset; r < offset + count; ++r) {
        clips.push_back(svm_score(model.svm, rows[r], cfg.score_mode));
      }
      offset += count;
      const auto fused = fuse_scores(clips);
      if (static_cast<std::size_t>(model.svm.labels[argmax(fused.values)]) == truth) ++correct;
    }
    result.train_accuracy[s] =
        static_cast<double>(correct) / static_cast<double>(sample_rows.size());
    result.models[s] = std::move(model);
  });
  return result;
}

Classification fuse_slots(const TrainedPlan& plan,
                          const std::vector<std::optional<ScoreVector>>& slot_scores) {
  if (slot_scores.size() != plan.plan.slots.size()) {
    throw ContractError("fuse_slots: expected one entry per slot");
  }
  std::vector<ScoreVector> dmm;
  std::vector<ScoreVector> rgb;
  for (std::size_t s = 0; s < slot_scores.size(); ++s) {
    if (!slot_scores[s]) continue;
    (plan.plan.slots[s].kind == StreamKind::dmm ? dmm : rgb).push_back(*slot_scores[s]);
  }
  if (dmm.empty() && rgb.empty()) throw EmptyInputError("no classifier slot produced a score");
  Classification out;
  out.slots = slot_scores;
  if (!dmm.empty()) out.dmm = fuse_scores(dmm);
  if (!rgb.empty()) out.rgb = fuse_scores(rgb);
  if (out.dmm && out.rgb) {
    const std::vector<ScoreVector> both{*out.rgb, *out.dmm};
    out.fused = fuse_scores(both);
  } else {
    out.fused = out.dmm ? *out.dmm : *out.rgb;
  }
  out.class_index = argmax(out.fused.values);
  out.label = out.class_index < plan.classes.size() ? plan.classes[out.class_index] : "";
  return out;
}

Classification classify(const LoadedSample& sample, const std::string& pose,
                        const TrainedPlan& plan, NetworkBank& nets) {
  if (!plan.trained()) throw StateError("classify: the plan has not been trained");
  const auto& cfg = plan.config;
  const auto prepared = prepare_sample(sample, pose, cfg, plan.plan);
  std::vector<std::optional<ScoreVector>> scores(plan.plan.slots.size());
  for (std::size_t s = 0; s < plan.plan.slots.size(); ++s) {
    const auto& slot = plan.plan.slots[s];
    if (slot.pose != pose || !plan.models[s]) continue;
    const auto rows = slot_rows(prepared, slot, slot_networks(slot, nets), cfg, plan.plan);
    if (!rows) continue;
    scores[s] = slot_score(*plan.models[s], *rows, plan.classes.size(), cfg.score_mode);
  }
  auto out = fuse_slots(plan, scores);
  out.warnings = prepared.warnings;
  return out;
}

Classification classify(const SampleRecord& record, const TrainedPlan& plan, NetworkBank& nets) {
  return classify(load_sample(record), record.pose, plan, nets);
}

EvalReport evaluate(const std::vector<SampleRecord>& records, const Split& split,
                    const TrainedPlan& plan, const SampleLoader& loader) {
  if (!plan.trained()) throw StateError("evaluate: the plan has not been trained");
  const auto part = partition(records, split);
  if (part.test.empty()) throw ProtocolError("split " + split.describe() + " leaves no test data");

  std::vector<std::optional<Classification>> results(part.test.size());
  std::vector<std::size_t> truths(part.test.size());
  NetworkBank nets(plan.config, plan.plan);
  parallel_for(part.test.size(), plan.config.workers, [&](std::size_t k) {
    const auto& rec = records[part.test[k]];
    truths[k] = class_index(plan.classes, rec.label);
    try {
      results[k] = classify(loader(rec), rec.pose, plan, nets);
    } catch (const EmptyInputError&) {
      // No slot produced features (e.g. a sequence shorter than every window).
      results[k].reset();
    }
  });

  EvalReport report;
  report.split = split.describe();
  report.classes = plan.classes;
  const auto slots = plan.plan.slots.size();
  std::vector<std::size_t> slot_correct(slots, 0);
  std::vector<std::size_t> slot_seen(slots, 0);
  std::size_t dmm_correct = 0, dmm_seen = 0, rgb_correct = 0, rgb_seen = 0;
  for (std::size_t k = 0; k < part.test.size(); ++k) {
    const auto& rec = records[part.test[k]];
    if (!results[k]) {
      report.skipped.push_back(sample_id(rec));
      continue;
    }
    const auto& c = *results[k];
    report.rows.push_back({sample_id(rec), truths[k], c.class_index});
    for (std::size_t s = 0; s < slots; ++s) {
      if (!c.slots[s]) continue;
      ++slot_seen[s];
      if (argmax(c.slots[s]->values) == truths[k]) ++slot_correct[s];
    }
    if (c.dmm) {
      ++dmm_seen;
      if (argmax(c.dmm->values) == truths[k]) ++dmm_correct;
    }
    if (c.rgb) {
      ++rgb_seen;
      if (argmax(c.rgb->values) == truths[k]) ++rgb_correct;
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b ? static_cast<double>(a) / static_cast<double>(b) : kNaN;
  };
  for (std::size_t s = 0; s < slots; ++s) {
    report.slot_names.push_back(plan.plan.slots[s].name());
    report.slot_accuracy.push_back(ratio(slot_correct[s], slot_seen[s]));
  }
  report.dmm_accuracy = ratio(dmm_correct, dmm_seen);
  report.rgb_accuracy = ratio(rgb_correct, rgb_seen);
  finalize(report);
  return report;
}

void save_plan(const TrainedPlan& plan, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "slots");
  save_config(plan.config, dir / "config.txt");
  std::string classes;
  for (const auto& c : plan.classes) classes += c + "\n";
  write_text(dir / "classes.txt", classes);
  std::string index = "# slot\tfile\ttrain_accuracy\n";
  for (std::size_t s = 0; s < plan.plan.slots.size(); ++s) {
    if (!plan.models[s]) continue;
    const auto file = "slots/" + plan.plan.slots[s].file_stem() + ".mdl";
    save_model(*plan.models[s], dir / file);
    index += plan.plan.slots[s].name() + "\t" + file + "\t" +
             format_double(plan.train_accuracy[s]) + "\n";
  }
  write_text(dir / "slots.tsv", index);
}

TrainedPlan load_plan(const std::filesystem::path& dir) {
  TrainedPlan plan;
  plan.config = load_config(dir / "config.txt");
  plan.plan = build_streams(plan.config);
  {
    std::istringstream in(text_of(read_file(dir / "classes.txt")));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) plan.classes.push_back(line);
    }
  }
  if (!std::is_sorted(plan.classes.begin(), plan.classes.end())) {
    throw FormatError("classes.txt must list class names in sorted order");
  }
  plan.models.assign(plan.plan.slots.size(), std::nullopt);
  plan.train_accuracy.assign(plan.plan.slots.size(), kNaN);
  std::istringstream in(text_of(read_file(dir / "slots.tsv")));
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string name, file, accuracy;
    if (!std::getline(fields, name, '\t') || !std::getline(fields, file, '\t')) {
      throw FormatError("slots.tsv: malformed line '" + line + "'");
    }
    std::getline(fields, accuracy, '\t');
    std::size_t s = 0;
    while (s < plan.plan.slots.size() && plan.plan.slots[s].name() != name) ++s;
    if (s == plan.plan.slots.size()) {
      throw FormatError("slots.tsv: slot '" + name + "' is not part of the configured plan");
    }
    auto model = load_model(dir / file);
    for (int label : model.svm.labels) {
      if (label < 0 || static_cast<std::size_t>(label) >= plan.classes.size()) {
        throw FormatError("model " + file + " refers to class " + std::to_string(label) +
                          " beyond classes.txt");
      }
    }
    plan.models[s] = std::move(model);
    plan.train_accuracy[s] = accuracy == "nan" || accuracy.empty() ? kNaN : std::stod(accuracy);
  }
  return plan;
}

}  // namespace mvdmm
