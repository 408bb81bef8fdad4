#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mvdmm {

struct EvalReport {
  std::string split;
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;       // rows = truth, columns = prediction
  std::vector<std::vector<double>> confusion_percent;  // each non-empty row sums to 100
  std::vector<double> class_accuracy;                  // NaN for classes absent from the test side
  double overall_accuracy = 0.0;
  std::size_t samples = 0;

  // Accuracy of every classifier slot on its own and of the two partial fusions.
  std::vector<std::string> slot_names;
  std::vector<double> slot_accuracy;  // NaN when the slot never scored a sample
  double dmm_accuracy = 0.0;
  double rgb_accuracy = 0.0;  // NaN without RGB slots

  struct Row {
    std::string sample;
    std::size_t truth = 0;
    std::size_t predicted = 0;
  };
  std::vector<Row> rows;
  std::vector<std::string> skipped;  // test samples that produced no features

  [[nodiscard]] double best_slot_accuracy() const;
};

/// Fills counts, percentages and accuracies from `rows`.
void finalize(EvalReport& report);

/// Fixed-width text table: per-class accuracy and the row-percent confusion matrix.
std::string format_table(const EvalReport& report);

/// Machine-readable form with fixed formatting, so equal reports give equal bytes.
std::string format_csv(const EvalReport& report);

}  // namespace mvdmm
