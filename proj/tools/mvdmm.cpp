// Command-line front end: synth, extract, train, eval, classify, render-dmm.

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mvdmm/config.hpp"
#include "mvdmm/dataset.hpp"
#include "mvdmm/error.hpp"
#include "mvdmm/pipeline.hpp"
#include "mvdmm/synth.hpp"

namespace fs = std::filesystem;
using namespace mvdmm;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string angles;
  std::string windows;
  std::string pose_bank;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Pipeline config file (key = value)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Network weight seed");
  cmd->add_option("--angles", o.angles, "Comma-separated view angles in degrees, e.g. -30,0,30");
  cmd->add_option("--windows", o.windows, "Comma-separated temporal windows, e.g. 5,10,ALL");
  cmd->add_option("--pose-bank", o.pose_bank, "Restrict to one pose bank");
}

PipelineConfig make_config(const CommonOptions& o) {
  PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.angles.empty()) cfg.angles = parse_angle_list(o.angles);
  if (!o.windows.empty()) cfg.windows = parse_window_list(o.windows);
  if (!o.pose_bank.empty()) cfg.poses = {o.pose_bank};
  validate(cfg);
  return cfg;
}

std::vector<SampleRecord> load_records(const std::string& manifest, const std::string& pose_bank) {
  auto records = read_manifest(manifest);
  if (!pose_bank.empty()) {
    std::erase_if(records, [&](const SampleRecord& r) { return r.pose != pose_bank; });
  }
  if (records.empty()) throw EmptyInputError("manifest " + manifest + " has no matching records");
  return records;
}

std::vector<int> parse_ids(const std::string& text) {
  std::vector<int> ids;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) ids.push_back(std::stoi(item));
  }
  return ids;
}

struct SplitOptions {
  std::string protocol = "cross-subject";
  std::string train_ids;
  std::string test_ids;

  [[nodiscard]] Split split() const {
    return {parse_protocol(protocol), parse_ids(train_ids), parse_ids(test_ids)};
  }
};

void add_split(CLI::App* cmd, SplitOptions& o) {
  cmd->add_option("--split", o.protocol, "cross-subject, cross-view, one-third or two-thirds")
      ->capture_default_str();
  cmd->add_option("--train-ids", o.train_ids, "Comma-separated subject/camera/repetition ids to train on");
  cmd->add_option("--test-ids", o.test_ids, "Comma-separated ids to test on");
}

void print_scores(const std::string& name, const Classification& c,
                  const std::vector<std::string>& classes) {
  std::string line = name + "\t" + c.label;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "=%.6f", c.fused.values[i]);
    line += "\t" + classes[i] + buf;
  }
  std::cout << line << "\n";
  for (const auto& w : c.warnings) std::cerr << "warning: " << name << ": " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view depth motion map action recognition"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic depth+RGB action dataset");
  SynthSpec spec;
  std::string synth_out;
  std::uint64_t synth_seed = 42;
  std::string actions;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Dataset seed")->capture_default_str();
  synth->add_option("--actions", actions, "Comma-separated actions (translate,oscillate,arc,push,static)");
  synth->add_option("--subjects", spec.subjects)->capture_default_str();
  synth->add_option("--cameras", spec.cameras)->capture_default_str();
  synth->add_option("--repetitions", spec.repetitions)->capture_default_str();
  synth->add_option("--frames", spec.frames)->capture_default_str();
  synth->add_option("--depth-noise", spec.depth_noise_mm, "Depth noise sigma in mm")->capture_default_str();
  synth->add_option("--jitter", spec.jitter, "Relative subject/take variation")->capture_default_str();
  synth->add_flag("!--no-rgb", spec.rgb, "Skip RGB frames");

  // extract
  auto* extract = app.add_subcommand("extract", "Write per-stream clip features of a manifest");
  CommonOptions extract_opts;
  std::string extract_manifest, extract_out;
  add_common(extract, extract_opts);
  extract->add_option("--manifest", extract_manifest)->required()->check(CLI::ExistingFile);
  extract->add_option("--out", extract_out, "Feature file (tab-separated)")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train every stream classifier");
  CommonOptions train_opts;
  SplitOptions train_split;
  std::string train_manifest, train_out;
  add_common(train_cmd, train_opts);
  add_split(train_cmd, train_split);
  train_cmd->add_option("--manifest", train_manifest)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_out, "Model directory")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained model on the test side of a split");
  SplitOptions eval_split;
  std::string eval_manifest, eval_model, eval_out, eval_pose;
  add_split(eval_cmd, eval_split);
  eval_cmd->add_option("--manifest", eval_manifest)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--model", eval_model)->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--out", eval_out, "CSV report path");
  eval_cmd->add_option("--pose-bank", eval_pose, "Restrict to one pose bank");

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "Classify one sequence or every manifest record");
  std::string cls_model, cls_input, cls_rgb, cls_crop, cls_pose, cls_manifest;
  classify_cmd->add_option("--model", cls_model)->required()->check(CLI::ExistingDirectory);
  auto* input_opt = classify_cmd->add_option("--input", cls_input, "Depth container (.bin)");
  classify_cmd->add_option("--rgb", cls_rgb, "Directory of PPM frames");
  classify_cmd->add_option("--crop", cls_crop, "Crop box file");
  classify_cmd->add_option("--pose", cls_pose, "Pose bank of the input (defaults to the first)");
  auto* manifest_opt = classify_cmd->add_option("--manifest", cls_manifest);
  input_opt->excludes(manifest_opt);

  // render-dmm
  auto* render = app.add_subcommand("render-dmm", "Export rendered DMM templates as PPM images");
  CommonOptions render_opts;
  std::string render_input, render_out;
  bool render_all = false;
  add_common(render, render_opts);
  render->add_option("--input", render_input, "Depth container (.bin)")->required()->check(CLI::ExistingFile);
  render->add_option("--out", render_out, "Output directory")->required();
  render->add_flag("--all", render_all, "Every template start, not just the first");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      if (!actions.empty()) {
        spec.actions.clear();
        std::stringstream in(actions);
        for (std::string a; std::getline(in, a, ',');) spec.actions.push_back(a);
      }
      const auto records = generate_synthetic_dataset(spec, synth_seed, synth_out);
      save_config(desk_pipeline_config(spec), fs::path(synth_out) / "config.txt");
      std::cout << "wrote " << records.size() << " samples to " << synth_out << "\n";
    } else if (extract->parsed()) {
      const auto cfg = make_config(extract_opts);
      const auto plan = build_streams(cfg);
      const auto records = load_records(extract_manifest, extract_opts.pose_bank);
      NetworkBank nets(cfg, plan);
      std::string out = "# sample\tstream\tclip_end\tvalues\n";
      for (std::size_t i = 0; i < records.size(); ++i) {
        const auto f = extract_sample(records[i], cfg, plan, nets);
        for (const auto& w : f.warnings) std::cerr << "warning: sample " << i << ": " << w << "\n";
        for (const auto& stream : f.streams) {
          for (const auto& fv : stream) {
            out += std::to_string(i) + "\t" + fv.provenance.stream + "\t" +
                   std::to_string(fv.provenance.clip_end) + "\t";
            for (std::size_t k = 0; k < fv.values.size(); ++k) {
              char buf[32];
              std::snprintf(buf, sizeof buf, k ? " %.9g" : "%.9g", fv.values[k]);
              out += buf;
            }
            out += "\n";
          }
        }
      }
      write_file(extract_out, {reinterpret_cast<const std::uint8_t*>(out.data()), out.size()});
    } else if (train_cmd->parsed()) {
      const auto cfg = make_config(train_opts);
      const auto records = load_records(train_manifest, train_opts.pose_bank);
      const auto plan = train(records, train_split.split(), cfg);
      save_plan(plan, train_out);
      std::size_t trained = 0;
      for (std::size_t s = 0; s < plan.models.size(); ++s) {
        if (!plan.models[s]) continue;
        ++trained;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", plan.train_accuracy[s]);
        std::cout << plan.plan.slots[s].name() << "\ttrain accuracy " << buf << "\n";
      }
      std::cout << trained << " of " << plan.models.size() << " classifier slots trained ("
                << plan.plan.streams.size() << " streams); model written to " << train_out << "\n";
    } else if (eval_cmd->parsed()) {
      const auto plan = load_plan(eval_model);
      const auto records = load_records(eval_manifest, eval_pose);
      const auto report = evaluate(records, eval_split.split(), plan);
      std::cout << format_table(report);
      if (!eval_out.empty()) {
        const auto csv = format_csv(report);
        write_file(eval_out, {reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()});
      }
    } else if (classify_cmd->parsed()) {
      const auto plan = load_plan(cls_model);
      NetworkBank nets(plan.config, plan.plan);
      if (!cls_manifest.empty()) {
        for (const auto& rec : read_manifest(cls_manifest)) {
          print_scores(rec.depth_path.string(), classify(rec, plan, nets), plan.classes);
        }
      } else {
        if (cls_input.empty()) throw ConfigError("classify needs --input or --manifest");
        SampleRecord rec;
        rec.depth_path = cls_input;
        if (!cls_rgb.empty()) rec.rgb_path = cls_rgb;
        if (!cls_crop.empty()) rec.crop_path = cls_crop;
        rec.pose = cls_pose.empty() ? plan.config.poses.front() : cls_pose;
        print_scores(cls_input, classify(rec, plan, nets), plan.classes);
      }
    } else if (render->parsed()) {
      const auto cfg = make_config(render_opts);
      LoadedSample sample;
      sample.depth = read_depth_bin(render_input);
      fs::create_directories(render_out);
      std::size_t written = 0;
      for (double angle : cfg.angles) {
        const auto seq = synthesized_sequence(sample, angle, cfg);
        std::array<std::vector<ProjectedMap>, 3> maps;
        for (const auto& frame : seq.frames) {
          auto p = project_cartesian(frame, cfg.bins, angle);
          for (std::size_t k = 0; k < 3; ++k) maps[k].push_back(std::move(p[k]));
        }
        for (auto plane : cfg.planes) {
          const auto& m = maps[static_cast<std::size_t>(plane)];
          std::vector<MagnitudeMap> weights;
          if (cfg.flow_weights) {
            std::vector<ScalarGrid> grids;
            for (const auto& x : m) grids.push_back(x.grid);
            weights = motion_weights(grids, cfg.flow, cfg.normalization);
          }
          for (auto window : cfg.windows) {
            const auto count = template_count(m.size(), window);
            for (std::size_t t = 0; t < (render_all ? count : std::min<std::size_t>(count, 1)); ++t) {
              const auto tpl = weights.empty() ? accumulate_dmm(m, t, window, cfg.dmm)
                                               : accumulate_ramdmm(m, weights, t, window, cfg.dmm);
              const auto name = "a" + format_angle(angle) + "_" + std::string(to_string(plane)) +
                                "_w" + window.to_string() + "_t" + std::to_string(t) + ".ppm";
              write_image(render_template(tpl, cfg.render_height, cfg.render_width),
                          fs::path(render_out) / name);
              ++written;
            }
          }
        }
      }
      std::cout << "wrote " << written << " images to " << render_out << "\n";
    }
  } catch (const mvdmm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
