#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "mvdmm/grid.hpp"

namespace mvdmm {

/// Dense displacement from frame a to frame b in pixels per frame.
struct FlowField {
  ScalarGrid ox;
  ScalarGrid oy;
};

struct MagnitudeMap {
  ScalarGrid g;
  bool normalized = false;
};

/// Horn-Schunck settings. `smoothness` is added to the per-pixel denominator
/// after both frames are jointly scaled so that their largest magnitude is 1.
struct FlowParams {
  int iterations = 100;
  double smoothness = 0.02;
};

/// Single-level Horn-Schunck with central-difference gradients and Jacobi updates.
FlowField estimate_flow(const ScalarGrid& a, const ScalarGrid& b, const FlowParams& params = {});

/// g = ox^2 + oy^2 (squared magnitude, no square root).
MagnitudeMap flow_magnitude(const FlowField& flow);

/// Divides by the map maximum (all-zero below eps). Results are rounded to
/// single precision so that rescaled inputs normalize to identical values.
MagnitudeMap normalize_magnitude(const MagnitudeMap& m, double eps = 1e-12);

/// Divides every map by the maximum over the whole sequence.
std::vector<MagnitudeMap> normalize_sequence(std::span<const MagnitudeMap> maps,
                                             double eps = 1e-12);

enum class Normalization { per_pair, per_sequence };

Normalization parse_normalization(std::string_view text);
std::string_view to_string(Normalization n);

/// Normalized motion weights for each consecutive pair: result[k] belongs to (k, k+1).
std::vector<MagnitudeMap> motion_weights(std::span<const ScalarGrid> maps,
                                         const FlowParams& params = {},
                                         Normalization mode = Normalization::per_pair);

}  // namespace mvdmm
