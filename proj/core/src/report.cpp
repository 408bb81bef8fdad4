#include "mvdmm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mvdmm {

namespace {

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

double EvalReport::best_slot_accuracy() const {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double a : slot_accuracy) {
    if (!std::isnan(a) && (std::isnan(best) || a > best)) best = a;
  }
  return best;
}

void finalize(EvalReport& report) {
  const auto n = report.classes.size();
  report.counts.assign(n, std::vector<std::size_t>(n, 0));
  for (const auto& row : report.rows) ++report.counts[row.truth][row.predicted];
  report.samples = report.rows.size();
  report.confusion_percent.assign(n, std::vector<double>(n, 0.0));
  report.class_accuracy.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::size_t correct = 0;
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t total = 0;
    for (auto c : report.counts[t]) total += c;
    correct += report.counts[t][t];
    if (total == 0) continue;
    for (std::size_t p = 0; p < n; ++p) {
      report.confusion_percent[t][p] =
          100.0 * static_cast<double>(report.counts[t][p]) / static_cast<double>(total);
    }
    report.class_accuracy[t] =
        static_cast<double>(report.counts[t][t]) / static_cast<double>(total);
  }
  report.overall_accuracy =
      report.samples ? static_cast<double>(correct) / static_cast<double>(report.samples) : 0.0;
}

std::string format_table(const EvalReport& report) {
  std::size_t width = 8;
  for (const auto& c : report.classes) width = std::max(width, c.size() + 1);
  std::string out = "split: " + report.split + "\n";
  out += "samples: " + std::to_string(report.samples);
  if (!report.skipped.empty()) out += " (" + std::to_string(report.skipped.size()) + " skipped)";
  out += "\n";
  out += "overall accuracy: " + fixed(100.0 * report.overall_accuracy, 2) + "%\n";
  out += "dmm-only accuracy: " + fixed(100.0 * report.dmm_accuracy, 2) + "%\n";
  if (!std::isnan(report.rgb_accuracy)) {
    out += "rgb-only accuracy: " + fixed(100.0 * report.rgb_accuracy, 2) + "%\n";
  }
  out += "best single slot: " + fixed(100.0 * report.best_slot_accuracy(), 2) + "%\n\n";
  out += "confusion (row %, truth x predicted)\n" + pad("", width);
  for (const auto& c : report.classes) out += pad(c, width);
  out += pad("acc%", width) + "\n";
  for (std::size_t t = 0; t < report.classes.size(); ++t) {
    out += pad(report.classes[t], width);
    for (double v : report.confusion_percent[t]) out += pad(fixed(v, 1), width);
    out += pad(fixed(100.0 * report.class_accuracy[t], 1), width) + "\n";
  }
  return out;
}

std::string format_csv(const EvalReport& report) {
  std::string out = "section,key,value\n";
  out += "summary,split," + report.split + "\n";
  out += "summary,samples," + std::to_string(report.samples) + "\n";
  out += "summary,overall_accuracy," + fixed(report.overall_accuracy, 6) + "\n";
  out += "summary,dmm_accuracy," + fixed(report.dmm_accuracy, 6) + "\n";
  out += "summary,rgb_accuracy," + fixed(report.rgb_accuracy, 6) + "\n";
  for (std::size_t t = 0; t < report.classes.size(); ++t) {
    out += "class_accuracy," + report.classes[t] + "," + fixed(report.class_accuracy[t], 6) + "\n";
  }
  for (std::size_t t = 0; t < report.classes.size(); ++t) {
    for (std::size_t p = 0; p < report.classes.size(); ++p) {
      out += "confusion_percent," + report.classes[t] + ">" + report.classes[p] + "," +
             fixed(report.confusion_percent[t][p], 4) + "\n";
    }
  }
  for (std::size_t s = 0; s < report.slot_names.size(); ++s) {
    out += "slot_accuracy," + report.slot_names[s] + "," + fixed(report.slot_accuracy[s], 6) + "\n";
  }
  for (const auto& name : report.skipped) out += "skipped," + name + ",\n";
  for (const auto& row : report.rows) {
    out += "prediction," + row.sample + "," + report.classes[row.truth] + ">" +
           report.classes[row.predicted] + "\n";
  }
  return out;
}

}  // namespace mvdmm
