#include "mvdmm/learn.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "byteio.hpp"
#include "mvdmm/error.hpp"
#include "mvdmm/random.hpp"
#include "mvdmm/videoio.hpp"

namespace mvdmm {

namespace {

using boost::multiprecision::cpp_int;

constexpr std::uint32_t kModelVersion = 1;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double round_to_single(double v) { return static_cast<double>(static_cast<float>(v)); }

// Rounds num / den * 2^exp2 to the nearest double (ties to even); den > 0.
double round_rational(cpp_int num, cpp_int den, long exp2) {
  if (num == 0) return 0.0;
  const bool negative = num < 0;
  if (negative) num = -num;
  // Choose a shift so the integer quotient has 53 significant bits.
  long shift = 53 - (static_cast<long>(msb(num)) - static_cast<long>(msb(den)));
  cpp_int q, r, d;
  for (;;) {
    cpp_int n = num;
    d = den;
    if (shift >= 0) n <<= static_cast<unsigned>(shift);
    else d <<= static_cast<unsigned>(-shift);
    divide_qr(n, d, q, r);
    if (q >= (cpp_int(1) << 53)) {
      --shift;
    } else if (q < (cpp_int(1) << 52)) {
      ++shift;
    } else {
      break;
    }
  }
  const cpp_int twice = r * 2;
  if (twice > d || (twice == d && (q & 1) != 0)) ++q;
  if (q == (cpp_int(1) << 53)) {
    q >>= 1;
    --shift;
  }
  const double mag = std::ldexp(q.convert_to<double>(), static_cast<int>(exp2 - shift));
  return negative ? -mag : mag;
}

}  // namespace

SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n, double tol, int max_sweeps) {
  if (a.size() != n * n) throw ContractError("jacobi_eigen: matrix is not n x n");
  SymmetricEigen out;
  out.vectors.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + i] = 1.0;
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  auto V = [&](std::size_t i, std::size_t j) -> double& { return out.vectors[i * n + j]; };

  double norm = 0.0;
  for (double v : a) norm += v * v;
  norm = std::sqrt(norm);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * A(i, j) * A(i, j);
    }
    if (std::sqrt(off) <= tol * norm) break;
    out.sweeps = sweep + 1;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = A(k, p);
          const double akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = A(p, k);
          const double aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = V(k, p);
          const double vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = A(i, i);
  return out;
}

PcaModel pca_fit(std::span<const std::vector<double>> samples, PcaTarget target) {
  if (samples.size() < 2) throw ContractError("pca_fit: need at least two samples");
  const std::size_t d = samples.front().size();
  const std::size_t n = samples.size();
  if (d == 0) throw ContractError("pca_fit: empty feature vectors");
  for (const auto& s : samples) {
    if (s.size() != d) throw ContractError("pca_fit: samples differ in length");
  }
  if (std::all_of(samples.begin(), samples.end(),
                  [&](const auto& s) { return s == samples.front(); })) {
    throw RankError("pca_fit: all samples are identical");
  }
  if (target.fixed_k == 0 && !(target.variance > 0.0 && target.variance <= 1.0)) {
    throw ContractError("pca_fit: variance target must lie in (0, 1]");
  }

  PcaModel model;
  model.dim = d;
  model.mean.assign(d, 0.0);
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += s[j];
  }
  for (auto& m : model.mean) m /= static_cast<double>(n);
  std::vector<double> x(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x[i * d + j] = samples[i][j] - model.mean[j];
  }
  const double denom = static_cast<double>(n - 1);
  const bool primal = d <= n;
  const std::size_t m = primal ? d : n;

  std::vector<double> cov(m * m, 0.0);
  if (primal) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = &x[i * d];
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) cov[a * d + b] += row[a] * row[b];
      }
    }
  } else {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        cov[a * n + b] = dot({&x[a * d], d}, {&x[b * d], d});
      }
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) {
      cov[a * m + b] /= denom;
      cov[b * m + a] = cov[a * m + b];
    }
  }

  const auto eig = jacobi_eigen(std::move(cov), m);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eig.values[a] > eig.values[b]; });

  double total = 0.0;
  for (double v : eig.values) total += std::max(v, 0.0);
  if (!(total > 0.0)) throw RankError("pca_fit: data has no variance");
  const double peak = std::max(eig.values[order.front()], 0.0);
  std::size_t available = 0;
  for (auto i : order) {
    if (eig.values[i] > 1e-12 * peak) ++available;
  }

  std::size_t k = 0;
  if (target.fixed_k > 0) {
    if (target.fixed_k > available) {
      throw ContractError("pca_fit: requested " + std::to_string(target.fixed_k) +
                          " components but the data has rank " + std::to_string(available));
    }
    k = target.fixed_k;
  } else {
    double cumulative = 0.0;
    while (k < available) {
      cumulative += std::max(eig.values[order[k]], 0.0);
      ++k;
      if (cumulative >= target.variance * total * (1.0 - 1e-12)) break;
    }
  }

  model.k = k;
  model.components.assign(k * d, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    const auto col = order[c];
    double* comp = &model.components[c * d];
    if (primal) {
      for (std::size_t j = 0; j < d; ++j) comp[j] = eig.vectors[j * m + col];
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double u = eig.vectors[i * m + col];
        for (std::size_t j = 0; j < d; ++j) comp[j] += u * x[i * d + j];
      }
    }
    // Gram-Schmidt against earlier rows, then unit length.
    for (std::size_t p = 0; p < c; ++p) {
      const double* prev = &model.components[p * d];
      const double proj = dot({comp, d}, {prev, d});
      for (std::size_t j = 0; j < d; ++j) comp[j] -= proj * prev[j];
    }
    const double len = std::sqrt(dot({comp, d}, {comp, d}));
    for (std::size_t j = 0; j < d; ++j) comp[j] /= len;
    // Deterministic sign: the largest-magnitude coordinate is positive.
    std::size_t big = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::abs(comp[j]) > std::abs(comp[big])) big = j;
    }
    if (comp[big] < 0.0) {
      for (std::size_t j = 0; j < d; ++j) comp[j] = -comp[j];
    }
    const double lambda = std::max(eig.values[col], 0.0);
    model.eigenvalues.push_back(lambda);
    model.explained.push_back(lambda / total);
  }
  return model;
}

std::vector<double> pca_project(const PcaModel& model, std::span<const double> v) {
  if (v.size() != model.dim) {
    throw ContractError("pca_project: expected length " + std::to_string(model.dim) + ", got " +
                        std::to_string(v.size()));
  }
  std::vector<double> centered(model.dim);
  for (std::size_t j = 0; j < model.dim; ++j) centered[j] = v[j] - model.mean[j];
  std::vector<double> out(model.k);
  for (std::size_t c = 0; c < model.k; ++c) out[c] = dot(model.component(c), centered);
  return out;
}

std::vector<double> pca_whiten(const PcaModel& model, std::span<const double> projected) {
  if (projected.size() != model.k) throw ContractError("pca_whiten: length mismatch");
  std::vector<double> out(model.k);
  for (std::size_t c = 0; c < model.k; ++c) {
    const double ev = model.eigenvalues[c];
    out[c] = ev > 0.0 ? projected[c] / std::sqrt(ev) : 0.0;
  }
  return out;
}

std::vector<double> pca_reconstruct(const PcaModel& model, std::span<const double> projected) {
  if (projected.size() != model.k) throw ContractError("pca_reconstruct: length mismatch");
  std::vector<double> out = model.mean;
  for (std::size_t c = 0; c < model.k; ++c) {
    const auto comp = model.component(c);
    for (std::size_t j = 0; j < model.dim; ++j) out[j] += projected[c] * comp[j];
  }
  return out;
}

SvmModel svm_train(std::span<const std::vector<double>> samples, std::span<const int> labels,
                   const SvmParams& params) {
  if (samples.size() != labels.size()) throw ContractError("svm_train: samples/labels mismatch");
  if (samples.empty()) throw ContractError("svm_train: no samples");
  if (!(params.lambda > 0.0)) throw ContractError("svm_train: lambda must be positive");
  const std::size_t d = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != d) throw ContractError("svm_train: samples differ in length");
  }
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw ContractError("svm_train: need at least two classes");

  SvmModel model;
  model.labels = classes;
  model.dim = d;
  model.lambda = params.lambda;
  model.weights.assign(classes.size() * d, 0.0);
  model.biases.assign(classes.size(), 0.0);

  const double radius = 1.0 / std::sqrt(params.lambda);
  std::vector<std::size_t> order(samples.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    Engine rng(derive_seed(params.seed, c));
    std::vector<double> w(d + 1, 0.0);  // last coordinate multiplies a constant 1
    std::uint64_t step = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), 0);
      shuffle(order.begin(), order.end(), rng);
      for (auto i : order) {
        ++step;
        const double eta = 1.0 / (params.lambda * static_cast<double>(step));
        const double y = labels[i] == classes[c] ? 1.0 : -1.0;
        const auto& xi = samples[i];
        const double margin = y * (dot({w.data(), d}, xi) + w[d]);
        const double decay = 1.0 - eta * params.lambda;
        for (auto& v : w) v *= decay;
        if (margin < 1.0) {
          for (std::size_t j = 0; j < d; ++j) w[j] += eta * y * xi[j];
          w[d] += eta * y;
        }
        const double len = std::sqrt(dot(w, w));
        if (len > radius) {
          const double shrink = radius / len;
          for (auto& v : w) v *= shrink;
        }
      }
    }
    for (std::size_t j = 0; j < d; ++j) model.weights[c * d + j] = round_to_single(w[j]);
    model.biases[c] = round_to_single(w[d]);
  }
  return model;
}

std::vector<double> svm_margins(const SvmModel& model, std::span<const double> v) {
  if (v.size() != model.dim) {
    throw ContractError("svm: expected feature length " + std::to_string(model.dim) + ", got " +
                        std::to_string(v.size()));
  }
  std::vector<double> out(model.classes());
  for (std::size_t c = 0; c < model.classes(); ++c) {
    out[c] = dot({&model.weights[c * model.dim], model.dim}, v) + model.biases[c];
  }
  return out;
}

ScoreMode parse_score_mode(std::string_view text) {
  if (text == "softmax") return ScoreMode::softmax;
  if (text == "raw") return ScoreMode::raw;
  throw ConfigError("unknown score mode '" + std::string(text) + "'");
}

std::string_view to_string(ScoreMode mode) { return mode == ScoreMode::softmax ? "softmax" : "raw"; }

ScoreVector softmax(std::span<const double> margins) {
  ScoreVector out{std::vector<double>(margins.size()), true};
  if (margins.empty()) return out;
  const double peak = *std::max_element(margins.begin(), margins.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    out.values[i] = std::exp(margins[i] - peak);
    sum += out.values[i];
  }
  for (auto& v : out.values) v /= sum;
  return out;
}

ScoreVector svm_score(const SvmModel& model, std::span<const double> v, ScoreMode mode) {
  auto margins = svm_margins(model, v);
  if (mode == ScoreMode::raw) return {std::move(margins), false};
  return softmax(margins);
}

double exact_mean(std::span<const double> values) {
  if (values.empty()) throw ContractError("exact_mean: no values");
  long min_exp = LONG_MAX;
  std::vector<std::pair<std::int64_t, long>> parts;
  parts.reserve(values.size());
  for (double v : values) {
    if (!std::isfinite(v)) throw ContractError("exact_mean: non-finite value");
    int e = 0;
    const double frac = std::frexp(v, &e);
    const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
    parts.emplace_back(mant, static_cast<long>(e) - 53);
    if (mant != 0) min_exp = std::min(min_exp, static_cast<long>(e) - 53);
  }
  if (min_exp == LONG_MAX) return 0.0;
  cpp_int sum = 0;
  for (const auto& [mant, exp] : parts) {
    if (mant == 0) continue;
    sum += cpp_int(mant) << static_cast<unsigned>(exp - min_exp);
  }
  return round_rational(sum, cpp_int(values.size()), min_exp);
}

ScoreVector fuse_scores(std::span<const ScoreVector> streams) {
  if (streams.empty()) throw ContractError("fuse_scores: no score vectors");
  const auto len = streams.front().values.size();
  const bool normalized = streams.front().normalized;
  for (const auto& s : streams) {
    if (s.values.size() != len) throw ContractError("fuse_scores: score vectors differ in length");
    if (s.normalized != normalized) {
      throw ContractError("fuse_scores: cannot mix normalized and raw score vectors");
    }
  }
  ScoreVector out{std::vector<double>(len), normalized};
  std::vector<double> column(streams.size());
  for (std::size_t c = 0; c < len; ++c) {
    for (std::size_t s = 0; s < streams.size(); ++s) column[s] = streams[s].values[c];
    out.values[c] = exact_mean(column);
  }
  return out;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw ContractError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<std::uint8_t> encode_model(const ClassifierModel& model) {
  const auto& svm = model.svm;
  detail::ByteWriter out;
  out.raw("MVDM");
  out.u32(kModelVersion);
  out.u32(static_cast<std::uint32_t>(svm.classes()));
  for (int l : svm.labels) out.i32(l);
  out.u32(static_cast<std::uint32_t>(svm.dim));
  out.f64(svm.lambda);
  for (double w : svm.weights) out.f32(static_cast<float>(w));
  for (double b : svm.biases) out.f32(static_cast<float>(b));
  out.u8(model.pca ? 1 : 0);
  if (model.pca) {
    const auto& p = *model.pca;
    out.u32(static_cast<std::uint32_t>(p.dim));
    out.u32(static_cast<std::uint32_t>(p.k));
    for (double v : p.mean) out.f64(v);
    for (double v : p.components) out.f64(v);
    for (double v : p.eigenvalues) out.f64(v);
    for (double v : p.explained) out.f64(v);
    out.u8(model.whiten ? 1 : 0);
  }
  return std::move(out.bytes());
}

ClassifierModel decode_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes, "model file");
  in.expect_raw("MVDM");
  const auto version = in.u32();
  if (version != kModelVersion) {
    throw FormatError("model file: unsupported version " + std::to_string(version));
  }
  ClassifierModel model;
  auto& svm = model.svm;
  const auto classes = in.u32();
  in.need(static_cast<std::size_t>(classes) * 4);
  for (std::uint32_t c = 0; c < classes; ++c) svm.labels.push_back(in.i32());
  svm.dim = in.u32();
  svm.lambda = in.f64();
  in.need(static_cast<std::size_t>(classes) * (svm.dim + 1) * 4);
  svm.weights.resize(classes * svm.dim);
  for (auto& w : svm.weights) w = in.f32();
  svm.biases.resize(classes);
  for (auto& b : svm.biases) b = in.f32();
  if (in.u8() != 0) {
    PcaModel p;
    p.dim = in.u32();
    p.k = in.u32();
    in.need((p.dim + p.k * p.dim + 2 * p.k) * 8);
    auto read = [&](std::vector<double>& v, std::size_t n) {
      v.resize(n);
      for (auto& x : v) x = in.f64();
    };
    read(p.mean, p.dim);
    read(p.components, p.k * p.dim);
    read(p.eigenvalues, p.k);
    read(p.explained, p.k);
    if (p.k != svm.dim) throw FormatError("model file: PCA output does not match SVM input");
    model.pca = std::move(p);
    model.whiten = in.u8() != 0;
  }
  if (!in.done()) throw FormatError("model file: trailing bytes");
  return model;
}

std::vector<double> classifier_input(const ClassifierModel& model, std::span<const double> v) {
  if (!model.pca) return {v.begin(), v.end()};
  auto projected = pca_project(*model.pca, v);
  return model.whiten ? pca_whiten(*model.pca, projected) : projected;
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
  write_file(path, encode_model(model));
}

ClassifierModel load_model(const std::filesystem::path& path) {
  return decode_model(read_file(path));
}

}  // namespace mvdmm
