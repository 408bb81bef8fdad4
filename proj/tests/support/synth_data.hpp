#pragma once

// In-memory synthetic datasets: records that name a take and a loader that
// renders it on demand, so end-to-end tests need no files.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvdmm/pipeline.hpp"
#include "mvdmm/synth.hpp"

namespace oracle {

inline std::vector<mvdmm::SampleRecord> synthetic_records(const mvdmm::SynthSpec& spec) {
  std::vector<mvdmm::SampleRecord> out;
  for (std::size_t a = 0; a < spec.actions.size(); ++a)
    for (std::size_t s = 0; s < spec.subjects; ++s)
      for (std::size_t c = 0; c < spec.cameras; ++c)
        for (std::size_t r = 0; r < spec.repetitions; ++r) {
          mvdmm::SampleRecord rec;
          rec.depth_path = "a" + std::to_string(a) + "_s" + std::to_string(s) + "_c" +
                           std::to_string(c) + "_r" + std::to_string(r);
          rec.label = spec.actions[a];
          rec.subject = static_cast<int>(s);
          rec.camera = static_cast<int>(c);
          rec.repetition = static_cast<int>(r);
          rec.pose = spec.pose;
          out.push_back(std::move(rec));
        }
  return out;
}

inline mvdmm::SampleLoader synthetic_loader(const mvdmm::SynthSpec& spec, std::uint64_t seed) {
  return [spec, seed](const mvdmm::SampleRecord& rec) {
    const auto it = std::find(spec.actions.begin(), spec.actions.end(), rec.label);
    if (it == spec.actions.end()) throw std::invalid_argument("unknown action " + rec.label);
    return mvdmm::synthesize_sample(spec, static_cast<std::size_t>(it - spec.actions.begin()),
                                    static_cast<std::size_t>(rec.subject),
                                    static_cast<std::size_t>(rec.camera),
                                    static_cast<std::size_t>(std::max(rec.repetition, 0)), seed);
  };
}

}  // namespace oracle
