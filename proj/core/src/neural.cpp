#include "mvdmm/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "byteio.hpp"
#include "mvdmm/error.hpp"
#include "mvdmm/random.hpp"
#include "mvdmm/videoio.hpp"

namespace mvdmm {

namespace {

enum LayerKind : std::uint32_t { kConv = 1, kPool = 2, kFlatten = 3, kDense = 4 };

std::size_t out_extent(std::size_t in, std::size_t pad, std::size_t k, std::size_t stride) {
  return (in + 2 * pad - k) / stride + 1;
}

[[noreturn]] void layer_error(std::string_view name, const std::string& msg) {
  throw ContractError("layer '" + std::string(name) + "': " + msg);
}

Shape4 conv_shape(const Shape4& in, const ConvLayerSpec& l) {
  if (in.c != l.in_maps) {
    layer_error(l.name, "expects " + std::to_string(l.in_maps) + " input maps, got " +
                            std::to_string(in.c));
  }
  if (l.kernel.t == 0 || l.kernel.h == 0 || l.kernel.w == 0 || l.stride.t == 0 ||
      l.stride.h == 0 || l.stride.w == 0) {
    layer_error(l.name, "kernel and stride must be positive");
  }
  if (in.d + 2 * l.padding.t < l.kernel.t || in.h + 2 * l.padding.h < l.kernel.h ||
      in.w + 2 * l.padding.w < l.kernel.w) {
    layer_error(l.name, "input " + in.to_string() + " smaller than kernel");
  }
  return {l.out_maps, out_extent(in.d, l.padding.t, l.kernel.t, l.stride.t),
          out_extent(in.h, l.padding.h, l.kernel.h, l.stride.h),
          out_extent(in.w, l.padding.w, l.kernel.w, l.stride.w)};
}

Shape4 pool_shape(const Shape4& in, std::string_view name, Triple k, Triple s) {
  if (k.t == 0 || k.h == 0 || k.w == 0 || s.t == 0 || s.h == 0 || s.w == 0) {
    layer_error(name, "kernel and stride must be positive");
  }
  if (in.d < k.t || in.h < k.h || in.w < k.w) {
    layer_error(name, "input " + in.to_string() + " smaller than pooling kernel");
  }
  return {in.c, out_extent(in.d, 0, k.t, s.t), out_extent(in.h, 0, k.h, s.h),
          out_extent(in.w, 0, k.w, s.w)};
}

Shape4 dense_shape(const Shape4& in, const DenseLayerSpec& l) {
  if (in.d != 1 || in.h != 1 || in.w != 1) layer_error(l.name, "input must be flattened");
  if (in.c != l.in_units) {
    layer_error(l.name, "expects " + std::to_string(l.in_units) + " inputs, got " +
                            std::to_string(in.c));
  }
  return {l.out_units, 1, 1, 1};
}

Shape4 next_shape(const Shape4& in, const Layer& layer) {
  return std::visit(
      [&](const auto& l) -> Shape4 {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ConvLayerSpec>) {
          return conv_shape(in, l);
        } else if constexpr (std::is_same_v<T, PoolLayerSpec>) {
          return pool_shape(in, l.name, l.kernel, l.stride);
        } else if constexpr (std::is_same_v<T, FlattenLayerSpec>) {
          return {in.volume(), 1, 1, 1};
        } else {
          return dense_shape(in, l);
        }
      },
      layer);
}

void check_weights(const ConvLayerSpec& l) {
  if (l.weights.size() != l.weight_count() || l.biases.size() != l.out_maps) {
    layer_error(l.name, "weights not initialized (expected " + std::to_string(l.weight_count()) +
                            " weights and " + std::to_string(l.out_maps) + " biases)");
  }
}

void check_weights(const DenseLayerSpec& l) {
  if (l.weights.size() != l.in_units * l.out_units || l.biases.size() != l.out_units) {
    layer_error(l.name, "weights not initialized");
  }
}

Tensor4 run_layer(const Tensor4& x, const Layer& layer) {
  return std::visit(
      [&](const auto& l) -> Tensor4 {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ConvLayerSpec>) {
          return conv3d_forward(x, l);
        } else if constexpr (std::is_same_v<T, PoolLayerSpec>) {
          pool_shape(x.shape, l.name, l.kernel, l.stride);
          return maxpool3d(x, l.kernel, l.stride);
        } else if constexpr (std::is_same_v<T, FlattenLayerSpec>) {
          Tensor4 out = x;
          out.shape = {x.shape.volume(), 1, 1, 1};
          return out;
        } else {
          return dense_forward(x, l);
        }
      },
      layer);
}

void fill_uniform(std::vector<float>& v, std::size_t n, double s, Engine& rng) {
  v.resize(n);
  for (auto& x : v) x = static_cast<float>(uniform(rng, -s, s));
}

}  // namespace

std::string Shape4::to_string() const {
  return std::to_string(c) + "x" + std::to_string(d) + "x" + std::to_string(h) + "x" +
         std::to_string(w);
}

std::string_view layer_name(const Layer& layer) {
  return std::visit([](const auto& l) -> std::string_view { return l.name; }, layer);
}

Tensor4 conv3d_forward(const Tensor4& input, const ConvLayerSpec& layer) {
  const Shape4 os = conv_shape(input.shape, layer);
  check_weights(layer);
  const Shape4& is = input.shape;
  const auto& k = layer.kernel;
  const auto& st = layer.stride;
  const auto& pad = layer.padding;

  Tensor4 out(os);
  const std::size_t plane = os.d * os.h * os.w;
  std::vector<double> acc(plane);
  for (std::size_t j = 0; j < os.c; ++j) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t m = 0; m < is.c; ++m) {
      for (std::size_t r = 0; r < k.t; ++r) {
        for (std::size_t p = 0; p < k.h; ++p) {
          for (std::size_t q = 0; q < k.w; ++q) {
            const double wgt =
                layer.weights[(((j * is.c + m) * k.t + r) * k.h + p) * k.w + q];
            // Output columns whose input column x*st.w + q - pad.w lies inside [0, is.w).
            const long shift = static_cast<long>(q) - static_cast<long>(pad.w);
            std::size_t x_lo = 0;
            if (shift < 0) x_lo = (static_cast<std::size_t>(-shift) + st.w - 1) / st.w;
            std::size_t x_hi = 0;  // exclusive
            {
              const long lim = static_cast<long>(is.w) - 1 - shift;
              x_hi = lim < 0 ? 0
                             : std::min(os.w, static_cast<std::size_t>(lim) / st.w + 1);
            }
            if (x_lo >= x_hi) continue;
            for (std::size_t z = 0; z < os.d; ++z) {
              const long zin = static_cast<long>(z * st.t + r) - static_cast<long>(pad.t);
              if (zin < 0 || zin >= static_cast<long>(is.d)) continue;
              for (std::size_t y = 0; y < os.h; ++y) {
                const long yin = static_cast<long>(y * st.h + p) - static_cast<long>(pad.h);
                if (yin < 0 || yin >= static_cast<long>(is.h)) continue;
                const double* __restrict src =
                    &input.data[((m * is.d + static_cast<std::size_t>(zin)) * is.h +
                                 static_cast<std::size_t>(yin)) * is.w];
                double* __restrict dst = &acc[(z * os.h + y) * os.w];
                if (st.w == 1) {
                  const double* __restrict s = src + (static_cast<long>(x_lo) + shift);
                  double* __restrict d = dst + x_lo;
                  const std::size_t n = x_hi - x_lo;
                  for (std::size_t i = 0; i < n; ++i) d[i] += wgt * s[i];
                } else {
                  for (std::size_t x = x_lo; x < x_hi; ++x) {
                    dst[x] += wgt * src[static_cast<long>(x * st.w) + shift];
                  }
                }
              }
            }
          }
        }
      }
    }
    const double bias = layer.biases[j];
    double* o = &out.data[j * plane];
    for (std::size_t i = 0; i < plane; ++i) o[i] = std::tanh(bias + acc[i]);
  }
  return out;
}

Tensor4 maxpool3d(const Tensor4& input, Triple kernel, Triple stride) {
  const Shape4 os = pool_shape(input.shape, "maxpool3d", kernel, stride);
  Tensor4 out(os);
  for (std::size_t c = 0; c < os.c; ++c) {
    for (std::size_t z = 0; z < os.d; ++z) {
      for (std::size_t y = 0; y < os.h; ++y) {
        for (std::size_t x = 0; x < os.w; ++x) {
          double best = -std::numeric_limits<double>::infinity();
          for (std::size_t r = 0; r < kernel.t; ++r) {
            for (std::size_t p = 0; p < kernel.h; ++p) {
              for (std::size_t q = 0; q < kernel.w; ++q) {
                best = std::max(best, input.at(c, z * stride.t + r, y * stride.h + p,
                                                x * stride.w + q));
              }
            }
          }
          out.at(c, z, y, x) = best;
        }
      }
    }
  }
  return out;
}

Tensor4 dense_forward(const Tensor4& input, const DenseLayerSpec& layer) {
  const Shape4 os = dense_shape(input.shape, layer);
  check_weights(layer);
  Tensor4 out(os);
  for (std::size_t o = 0; o < layer.out_units; ++o) {
    const float* row = &layer.weights[o * layer.in_units];
    double sum = 0.0;
    for (std::size_t i = 0; i < layer.in_units; ++i) sum += row[i] * input.data[i];
    out.data[o] = std::tanh(layer.biases[o] + sum);
  }
  return out;
}

std::vector<Shape4> infer_shapes(const NetworkSpec& net) {
  std::vector<Shape4> shapes;
  Shape4 s = net.input;
  for (const auto& layer : net.layers) {
    s = next_shape(s, layer);
    shapes.push_back(s);
  }
  return shapes;
}

std::vector<Shape4> trace_shapes(const NetworkSpec& net, const Tensor4& input) {
  if (!(input.shape == net.input)) {
    throw ContractError("network input " + net.input.to_string() + " does not match tensor " +
                        input.shape.to_string());
  }
  std::vector<Shape4> shapes;
  Tensor4 x = input;
  for (const auto& layer : net.layers) {
    x = run_layer(x, layer);
    shapes.push_back(x.shape);
  }
  return shapes;
}

NetworkSpec c3d_network(std::size_t lambda, std::size_t height, std::size_t width) {
  NetworkSpec net;
  net.input = {3, lambda, height, width};
  Shape4 s = net.input;
  auto conv = [&](std::string name, std::size_t maps) {
    ConvLayerSpec l;
    l.name = std::move(name);
    l.in_maps = s.c;
    l.out_maps = maps;
    l.padding = {1, 1, 1};
    s = next_shape(s, l);
    net.layers.emplace_back(std::move(l));
  };
  auto pool = [&](std::string name, Triple k) {
    PoolLayerSpec l{std::move(name), k, k};
    if (s.d < l.kernel.t) l.kernel.t = l.stride.t = 1;
    s = next_shape(s, l);
    net.layers.emplace_back(std::move(l));
  };
  conv("conv1a", 64);
  pool("pool1", {1, 2, 2});
  conv("conv2a", 128);
  pool("pool2", {2, 2, 2});
  conv("conv3a", 256);
  conv("conv3b", 256);
  pool("pool3", {2, 2, 2});
  conv("conv4a", 512);
  conv("conv4b", 512);
  pool("pool4", {2, 2, 2});
  conv("conv5a", 512);
  conv("conv5b", 512);
  pool("pool5", {2, 2, 2});
  net.layers.emplace_back(FlattenLayerSpec{"flatten"});
  net.layers.emplace_back(DenseLayerSpec{"fc6", s.volume(), 4096, {}, {}});
  net.layers.emplace_back(DenseLayerSpec{"fc7", 4096, 4096, {}, {}});
  return net;
}

NetworkSpec desk_network(std::size_t lambda, std::size_t height, std::size_t width,
                         const DeskNetParams& params) {
  NetworkSpec net;
  net.input = {3, lambda, height, width};
  Shape4 s = net.input;
  auto add = [&](Layer layer) {
    s = next_shape(s, layer);
    net.layers.push_back(std::move(layer));
  };
  ConvLayerSpec c1;
  c1.name = "conv1";
  c1.in_maps = 3;
  c1.out_maps = params.conv1_maps;
  add(c1);
  add(PoolLayerSpec{"pool1", {1, 2, 2}, {1, 2, 2}});
  ConvLayerSpec c2;
  c2.name = "conv2";
  c2.in_maps = params.conv1_maps;
  c2.out_maps = params.conv2_maps;
  add(c2);
  PoolLayerSpec p2{"pool2", {2, 2, 2}, {2, 2, 2}};
  if (s.d < 2) p2.kernel.t = p2.stride.t = 1;
  add(p2);
  add(FlattenLayerSpec{"flatten"});
  add(DenseLayerSpec{"fc", s.volume(), params.fc_units, {}, {}});
  return net;
}

void initialize_weights(NetworkSpec& net, std::uint64_t seed) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    Engine rng(derive_seed(seed, i));
    std::visit(
        [&](auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, ConvLayerSpec>) {
            const double s = 1.0 / std::sqrt(static_cast<double>(l.fan_in()));
            fill_uniform(l.weights, l.weight_count(), s, rng);
            fill_uniform(l.biases, l.out_maps, s, rng);
          } else if constexpr (std::is_same_v<T, DenseLayerSpec>) {
            const double s = 1.0 / std::sqrt(static_cast<double>(l.in_units));
            fill_uniform(l.weights, l.in_units * l.out_units, s, rng);
            fill_uniform(l.biases, l.out_units, s, rng);
          }
        },
        net.layers[i]);
  }
}

Tensor4 clip_to_tensor(const Clip& clip) {
  if (clip.frames.empty()) throw ContractError("empty clip");
  const auto& first = clip.frames.front();
  Tensor4 t({3, clip.lambda(), first.height, first.width});
  for (std::size_t z = 0; z < clip.lambda(); ++z) {
    const auto& f = clip.frames[z];
    if (!f.same_shape(first)) throw ContractError("clip frames differ in size");
    for (std::size_t y = 0; y < f.height; ++y) {
      for (std::size_t x = 0; x < f.width; ++x) {
        const auto& px = f(x, y);
        t.at(0, z, y, x) = px.r / 255.0;
        t.at(1, z, y, x) = px.g / 255.0;
        t.at(2, z, y, x) = px.b / 255.0;
      }
    }
  }
  return t;
}

FeatureVector extract_features(const Tensor4& input, const NetworkSpec& net) {
  if (!(input.shape == net.input)) {
    throw ContractError("clip shape " + input.shape.to_string() +
                        " does not match network input " + net.input.to_string());
  }
  Tensor4 x = input;
  for (const auto& layer : net.layers) {
    x = run_layer(x, layer);
    if (std::holds_alternative<DenseLayerSpec>(layer)) return {std::move(x.data), {}};
  }
  throw ContractError("network has no fully-connected layer");
}

FeatureVector extract_features(const Clip& clip, const NetworkSpec& net) {
  return extract_features(clip_to_tensor(clip), net);
}

FeatureVector concat_views(const FeatureVector& xy, const FeatureVector& yz,
                           const FeatureVector& xz) {
  auto same = [](const Provenance& a, const Provenance& b) {
    return a.pose == b.pose && a.window == b.window && a.angle_deg == b.angle_deg &&
           a.clip_end == b.clip_end;
  };
  if (!same(xy.provenance, yz.provenance) || !same(xy.provenance, xz.provenance)) {
    throw ContractError("concat_views: provenance mismatch (pose, window, angle or clip differ)");
  }
  auto plane_ok = [](const FeatureVector& f, Plane p) {
    return !f.provenance.plane || *f.provenance.plane == p;
  };
  if (!plane_ok(xy, Plane::xy) || !plane_ok(yz, Plane::yz) || !plane_ok(xz, Plane::xz)) {
    throw ContractError("concat_views: inputs must be the xy, yz and xz views in that order");
  }
  FeatureVector out;
  out.values.reserve(xy.values.size() + yz.values.size() + xz.values.size());
  for (const auto* f : {&xy, &yz, &xz}) {
    out.values.insert(out.values.end(), f->values.begin(), f->values.end());
  }
  out.provenance = xy.provenance;
  out.provenance.plane.reset();
  return out;
}

std::vector<std::uint8_t> encode_weights(const NetworkSpec& net) {
  detail::ByteWriter out;
  out.u32(static_cast<std::uint32_t>(net.layers.size()));
  for (auto v : {net.input.c, net.input.d, net.input.h, net.input.w}) {
    out.u32(static_cast<std::uint32_t>(v));
  }
  auto triple = [&](const Triple& t) {
    out.u32(static_cast<std::uint32_t>(t.t));
    out.u32(static_cast<std::uint32_t>(t.h));
    out.u32(static_cast<std::uint32_t>(t.w));
  };
  for (const auto& layer : net.layers) {
    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, ConvLayerSpec>) {
            check_weights(l);
            out.u32(kConv);
            out.str(l.name);
            out.u32(static_cast<std::uint32_t>(l.in_maps));
            out.u32(static_cast<std::uint32_t>(l.out_maps));
            triple(l.kernel);
            triple(l.stride);
            triple(l.padding);
            for (float w : l.weights) out.f32(w);
            for (float b : l.biases) out.f32(b);
          } else if constexpr (std::is_same_v<T, PoolLayerSpec>) {
            out.u32(kPool);
            out.str(l.name);
            triple(l.kernel);
            triple(l.stride);
          } else if constexpr (std::is_same_v<T, FlattenLayerSpec>) {
            out.u32(kFlatten);
            out.str(l.name);
          } else {
            check_weights(l);
            out.u32(kDense);
            out.str(l.name);
            out.u32(static_cast<std::uint32_t>(l.in_units));
            out.u32(static_cast<std::uint32_t>(l.out_units));
            for (float w : l.weights) out.f32(w);
            for (float b : l.biases) out.f32(b);
          }
        },
        layer);
  }
  return std::move(out.bytes());
}

NetworkSpec decode_weights(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes, "weight file");
  const auto count = in.u32();
  NetworkSpec net;
  net.input.c = in.u32();
  net.input.d = in.u32();
  net.input.h = in.u32();
  net.input.w = in.u32();
  auto triple = [&] {
    Triple t;
    t.t = in.u32();
    t.h = in.u32();
    t.w = in.u32();
    return t;
  };
  auto floats = [&](std::vector<float>& v, std::size_t n) {
    in.need(n * 4);
    v.resize(n);
    for (auto& x : v) x = in.f32();
  };
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto kind = in.u32();
    auto name = in.str();
    switch (kind) {
      case kConv: {
        ConvLayerSpec l;
        l.name = std::move(name);
        l.in_maps = in.u32();
        l.out_maps = in.u32();
        l.kernel = triple();
        l.stride = triple();
        l.padding = triple();
        floats(l.weights, l.weight_count());
        floats(l.biases, l.out_maps);
        net.layers.emplace_back(std::move(l));
        break;
      }
      case kPool: {
        PoolLayerSpec l;
        l.name = std::move(name);
        l.kernel = triple();
        l.stride = triple();
        net.layers.emplace_back(std::move(l));
        break;
      }
      case kFlatten:
        net.layers.emplace_back(FlattenLayerSpec{std::move(name)});
        break;
      case kDense: {
        DenseLayerSpec l;
        l.name = std::move(name);
        l.in_units = in.u32();
        l.out_units = in.u32();
        floats(l.weights, l.in_units * l.out_units);
        floats(l.biases, l.out_units);
        net.layers.emplace_back(std::move(l));
        break;
      }
      default:
        throw FormatError("weight file: unknown layer kind " + std::to_string(kind));
    }
  }
  if (!in.done()) throw FormatError("weight file: trailing bytes after last layer");
  infer_shapes(net);
  return net;
}

void save_weights(const NetworkSpec& net, const std::filesystem::path& path) {
  write_file(path, encode_weights(net));
}

NetworkSpec load_weights(const std::filesystem::path& path) {
  return decode_weights(read_file(path));
}

}  // namespace mvdmm
