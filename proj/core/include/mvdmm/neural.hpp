#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mvdmm/dmm.hpp"
#include "mvdmm/geometry.hpp"

namespace mvdmm {

/// channels x depth (time) x height x width
struct Shape4 {
  std::size_t c = 1;
  std::size_t d = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  [[nodiscard]] std::size_t volume() const { return c * d * h * w; }
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Shape4&, const Shape4&) = default;
};

struct Tensor4 {
  Shape4 shape;
  std::vector<double> data;

  Tensor4() = default;
  explicit Tensor4(Shape4 s, double fill = 0.0) : shape(s), data(s.volume(), fill) {}

  double& at(std::size_t c, std::size_t z, std::size_t y, std::size_t x) {
    return data[((c * shape.d + z) * shape.h + y) * shape.w + x];
  }
  [[nodiscard]] double at(std::size_t c, std::size_t z, std::size_t y, std::size_t x) const {
    return data[((c * shape.d + z) * shape.h + y) * shape.w + x];
  }
};

/// (temporal, height, width)
struct Triple {
  std::size_t t = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  friend bool operator==(const Triple&, const Triple&) = default;
};

/// tanh(b_j + sum_m sum_r sum_p sum_q w[j][m][r][p][q] * in[m][z+r][y+p][x+q])
/// Weights are laid out [out_maps][in_maps][kernel.t][kernel.h][kernel.w].
struct ConvLayerSpec {
  std::string name;
  std::size_t in_maps = 1;
  std::size_t out_maps = 1;
  Triple kernel{3, 3, 3};
  Triple stride{1, 1, 1};
  Triple padding{0, 0, 0};
  std::vector<float> weights;
  std::vector<float> biases;

  [[nodiscard]] std::size_t weight_count() const {
    return out_maps * in_maps * kernel.t * kernel.h * kernel.w;
  }
  [[nodiscard]] std::size_t fan_in() const { return in_maps * kernel.t * kernel.h * kernel.w; }
};

struct PoolLayerSpec {
  std::string name;
  Triple kernel{2, 2, 2};
  Triple stride{2, 2, 2};
};

struct FlattenLayerSpec {
  std::string name;
};

/// tanh(b + W x) with W laid out [out_units][in_units].
struct DenseLayerSpec {
  std::string name;
  std::size_t in_units = 1;
  std::size_t out_units = 1;
  std::vector<float> weights;
  std::vector<float> biases;
};

using Layer = std::variant<ConvLayerSpec, PoolLayerSpec, FlattenLayerSpec, DenseLayerSpec>;

std::string_view layer_name(const Layer& layer);

struct NetworkSpec {
  Shape4 input{3, 16, 112, 112};
  std::vector<Layer> layers;
};

/// Valid (or explicitly padded) 3D convolution; output extent per axis is
/// floor((in + 2 pad - k) / stride) + 1.
Tensor4 conv3d_forward(const Tensor4& input, const ConvLayerSpec& layer);

/// Per-channel windowed maximum.
Tensor4 maxpool3d(const Tensor4& input, Triple kernel, Triple stride);

Tensor4 dense_forward(const Tensor4& input, const DenseLayerSpec& layer);

/// Output shape after every layer (flattened tensors are {n, 1, 1, 1}).
/// Throws ContractError naming the first layer whose input does not fit.
std::vector<Shape4> infer_shapes(const NetworkSpec& net);

/// Executes the whole stack and records the actual output shape of every layer.
std::vector<Shape4> trace_shapes(const NetworkSpec& net, const Tensor4& input);

/// The eight-conv / five-pool / two-fc stack (64,128,256,256,512,512,512,512 maps,
/// 3x3x3 kernels, first pool 1x2x2, fc 4096). Convolutions are zero-padded by one
/// so the stack runs at 16 frames; pools whose temporal kernel exceeds the remaining
/// depth (short clips) collapse to temporal size 1. Weights are left empty.
NetworkSpec c3d_network(std::size_t lambda = 16, std::size_t height = 112,
                        std::size_t width = 112);

struct DeskNetParams {
  std::size_t conv1_maps = 8;
  std::size_t conv2_maps = 16;
  std::size_t fc_units = 64;
};

/// conv(3x3x3) -> pool 1x2x2 -> conv(3x3x3) -> pool 2x2x2 -> flatten -> fc. Valid convolutions.
NetworkSpec desk_network(std::size_t lambda, std::size_t height, std::size_t width,
                         const DeskNetParams& params = {});

/// Uniform(-s, s) weights and biases with s = 1 / sqrt(fan_in), one RNG stream per layer.
void initialize_weights(NetworkSpec& net, std::uint64_t seed);

/// Identifies which stream and clip a feature vector came from.
struct Provenance {
  std::string stream;
  std::string pose;
  std::optional<Plane> plane;
  TemporalWindow window;
  double angle_deg = 0.0;
  std::size_t clip_end = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct FeatureVector {
  std::vector<double> values;
  Provenance provenance;
};

/// 3 x lambda x H x W tensor with channel values scaled into [0, 1].
Tensor4 clip_to_tensor(const Clip& clip);

/// Runs the stack and returns the activations of the first fully-connected layer.
FeatureVector extract_features(const Tensor4& input, const NetworkSpec& net);
FeatureVector extract_features(const Clip& clip, const NetworkSpec& net);

/// xy || yz || xz; throws ContractError unless pose, window, angle and clip agree.
FeatureVector concat_views(const FeatureVector& xy, const FeatureVector& yz,
                           const FeatureVector& xz);

// Weight file: [u32 layerCount][u32 c d h w of the input], then per layer
// [u32 kind][u32 nameLen][name bytes][u32 dims...][f32 weights...][f32 biases...],
// all little-endian. Kinds: 1 conv, 2 pool, 3 flatten, 4 dense.
std::vector<std::uint8_t> encode_weights(const NetworkSpec& net);
NetworkSpec decode_weights(std::span<const std::uint8_t> bytes);
void save_weights(const NetworkSpec& net, const std::filesystem::path& path);
NetworkSpec load_weights(const std::filesystem::path& path);

}  // namespace mvdmm
