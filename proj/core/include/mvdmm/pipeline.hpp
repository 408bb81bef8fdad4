#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mvdmm/config.hpp"
#include "mvdmm/dataset.hpp"
#include "mvdmm/learn.hpp"
#include "mvdmm/neural.hpp"
#include "mvdmm/report.hpp"
#include "mvdmm/streams.hpp"

namespace mvdmm {

/// Rendered images feeding each stream of one sample's pose bank, before any network runs.
struct PreparedSample {
  std::string pose;
  std::vector<std::vector<ColorImage>> images;  // indexed like StreamPlan::streams
  std::vector<bool> present;                    // false for other banks or missing inputs
  std::vector<std::string> warnings;
};

/// Crop masking, view synthesis, projection, flow weighting, RAMDMM
/// accumulation and rendering for the DMM streams; resizing for the RGB streams.
/// Only the streams of `pose` are filled. Too-short inputs leave a stream absent
/// with a warning rather than failing.
PreparedSample prepare_sample(const LoadedSample& sample, const std::string& pose,
                              const PipelineConfig& cfg, const StreamPlan& plan);

/// Depth frames as the pipeline sees them at one view angle (after cropping and synthesis).
DepthSequence synthesized_sequence(const LoadedSample& sample, double angle_deg,
                                   const PipelineConfig& cfg);

/// Features of every stride-lambda clip of one stream.
std::vector<FeatureVector> stream_features(const PreparedSample& sample, std::size_t stream,
                                           const NetworkSpec& net, const PipelineConfig& cfg,
                                           const StreamPlan& plan);

/// Lazily materialized per-stream networks; safe to share between threads.
class NetworkBank {
 public:
  NetworkBank(PipelineConfig cfg, StreamPlan plan);

  std::shared_ptr<const NetworkSpec> get(std::size_t stream);
  void release(std::size_t stream);

 private:
  PipelineConfig cfg_;
  StreamPlan plan_;
  std::mutex mutex_;
  std::map<std::size_t, std::shared_ptr<const NetworkSpec>> nets_;
};

struct SampleFeatures {
  std::vector<std::vector<FeatureVector>> streams;  // per stream; empty when absent
  std::vector<std::string> warnings;
};

SampleFeatures extract_sample(const LoadedSample& sample, const std::string& pose,
                              const PipelineConfig& cfg, const StreamPlan& plan,
                              NetworkBank& nets);
SampleFeatures extract_sample(const SampleRecord& record, const PipelineConfig& cfg,
                              const StreamPlan& plan, NetworkBank& nets);

/// Joins the clip features of a slot's streams, checking pose, window, angle and clip agree.
FeatureVector concat_features(std::span<const FeatureVector> parts);

struct TrainedPlan {
  PipelineConfig config;
  StreamPlan plan;
  std::vector<std::string> classes;
  std::vector<std::optional<ClassifierModel>> models;  // per slot; empty when the bank had no data
  std::vector<double> train_accuracy;                  // per slot; NaN when untrained

  [[nodiscard]] bool trained() const;
};

using SampleLoader = std::function<LoadedSample(const SampleRecord&)>;

/// Per slot: features of the training side, PCA, one-vs-rest SVM. Throws
/// ProtocolError when a class has no training sample or the train side is empty.
TrainedPlan train(const std::vector<SampleRecord>& records, const Split& split,
                  const PipelineConfig& cfg, const SampleLoader& loader = load_sample);

struct Classification {
  std::size_t class_index = 0;
  std::string label;
  ScoreVector fused;
  std::optional<ScoreVector> dmm;
  std::optional<ScoreVector> rgb;
  std::vector<std::optional<ScoreVector>> slots;  // per slot; empty when not used
  std::vector<std::string> warnings;
};

/// Mean of clip scores per slot, then the DMM and RGB averages, then their
/// average (the DMM average alone when no RGB slot contributes).
/// Throws StateError for an untrained plan and EmptyInputError when no slot
/// produced features for the sample.
Classification classify(const LoadedSample& sample, const std::string& pose,
                        const TrainedPlan& plan, NetworkBank& nets);
Classification classify(const SampleRecord& record, const TrainedPlan& plan, NetworkBank& nets);

/// Fuses already computed slot scores exactly as classify does.
Classification fuse_slots(const TrainedPlan& plan,
                          const std::vector<std::optional<ScoreVector>>& slot_scores);

/// Classifies the test side of the split. Throws ProtocolError if it is empty.
EvalReport evaluate(const std::vector<SampleRecord>& records, const Split& split,
                    const TrainedPlan& plan, const SampleLoader& loader = load_sample);

// Model directory: config.txt, classes.txt, slots.tsv and one model file per trained slot.
void save_plan(const TrainedPlan& plan, const std::filesystem::path& dir);
TrainedPlan load_plan(const std::filesystem::path& dir);

}  // namespace mvdmm
