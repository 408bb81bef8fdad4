#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mvdmm {

struct SymmetricEigen {
  std::vector<double> values;   // unsorted, one per column of `vectors`
  std::vector<double> vectors;  // n x n row-major, column i is the eigenvector of values[i]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// tol * ||A||_F. `a` is an n x n row-major symmetric matrix.
SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n, double tol = 1e-10,
                            int max_sweeps = 100);

struct PcaModel {
  std::size_t dim = 0;
  std::size_t k = 0;
  std::vector<double> mean;
  std::vector<double> components;  // k x dim row-major, orthonormal rows
  std::vector<double> eigenvalues;  // descending, length k
  std::vector<double> explained;    // fraction of total variance per component

  [[nodiscard]] std::span<const double> component(std::size_t i) const {
    return {components.data() + i * dim, dim};
  }
};

/// Either retain the smallest number of components reaching `variance`, or exactly `fixed_k`.
struct PcaTarget {
  double variance = 0.95;
  std::size_t fixed_k = 0;

  static PcaTarget variance_fraction(double v) { return {v, 0}; }
  static PcaTarget components(std::size_t k) { return {1.0, k}; }
};

/// Eigenvectors of the sample covariance in descending eigenvalue order. When
/// there are fewer samples than dimensions the (equivalent) Gram matrix is
/// decomposed instead. Throws RankError if all samples are identical.
PcaModel pca_fit(std::span<const std::vector<double>> samples, PcaTarget target = {});

std::vector<double> pca_project(const PcaModel& model, std::span<const double> v);
std::vector<double> pca_reconstruct(const PcaModel& model, std::span<const double> projected);

/// Divides each projected coordinate by the standard deviation of its component
/// (zero-variance components map to 0).
std::vector<double> pca_whiten(const PcaModel& model, std::span<const double> projected);

struct SvmParams {
  double lambda = 1e-3;
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
};

/// One-vs-rest linear SVMs; row c of `weights` scores labels[c].
struct SvmModel {
  std::vector<int> labels;
  std::size_t dim = 0;
  std::vector<double> weights;  // labels.size() x dim
  std::vector<double> biases;
  double lambda = 0.0;

  [[nodiscard]] std::size_t classes() const { return labels.size(); }
};

/// Pegasos stochastic subgradient descent (step 1/(lambda t), a constant-1
/// feature for the bias, projection onto the 1/sqrt(lambda) ball). Weights are
/// rounded to single precision on completion so stored models reload bit-exactly.
SvmModel svm_train(std::span<const std::vector<double>> samples, std::span<const int> labels,
                   const SvmParams& params = {});

std::vector<double> svm_margins(const SvmModel& model, std::span<const double> v);

enum class ScoreMode { softmax, raw };

ScoreMode parse_score_mode(std::string_view text);
std::string_view to_string(ScoreMode mode);

/// Per-class scores ordered like the model's labels.
struct ScoreVector {
  std::vector<double> values;
  bool normalized = false;

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;
};

ScoreVector softmax(std::span<const double> margins);
ScoreVector svm_score(const SvmModel& model, std::span<const double> v,
                      ScoreMode mode = ScoreMode::softmax);

/// Elementwise arithmetic mean, correctly rounded from the exact sum, so the
/// result does not depend on stream order and fusing copies of one vector is exact.
ScoreVector fuse_scores(std::span<const ScoreVector> streams);

/// Index of the largest score; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

/// Correctly rounded mean of `values` (exact rational arithmetic).
double exact_mean(std::span<const double> values);

/// A trained stream classifier: optional PCA followed by the SVM.
struct ClassifierModel {
  std::optional<PcaModel> pca;
  bool whiten = false;  // only meaningful with a PCA stage
  SvmModel svm;
};

/// The SVM input for a raw feature vector: PCA projection and optional whitening.
std::vector<double> classifier_input(const ClassifierModel& model, std::span<const double> v);

// Model file: "MVDM" u32 version, u32 classCount, i32 labels, u32 dim, f64 lambda,
// f32 weights, f32 biases, u8 hasPca, then (u32 dim, u32 k, f64 mean,
// f64 components, f64 eigenvalues, f64 explained, u8 whiten) when present. Little-endian.
std::vector<std::uint8_t> encode_model(const ClassifierModel& model);
ClassifierModel decode_model(std::span<const std::uint8_t> bytes);
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

}  // namespace mvdmm
