#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wcstlab/metrics/metrics.hpp"

namespace wcst::metrics {

struct ReportRow {
  std::string label;
  double acc = 0.0;
  std::optional<double> per;
  double rc = 0.0;
  double latency = 0.0;
};

ReportRow to_row(const std::string& label, const SessionMetrics& m);

// Unweighted mean of session values; PER averages the sessions that have one.
ReportRow aggregate(const std::string& label, std::span<const SessionMetrics> sessions);

struct ReportOptions {
  // Printed arrow of the PER column; the column is labelled an error rate yet
  // the reference table marks higher as better.
  bool per_higher_is_better = true;
};

enum Column { kAcc = 0, kPer = 1, kRc = 2, kLatency = 3 };

class ReportTable {
 public:
  ReportTable(std::vector<ReportRow> rows, ReportOptions options);

  const std::vector<ReportRow>& rows() const { return rows_; }
  bool is_best(std::size_t row, Column column) const { return best_[row][column]; }

  // Fixed-width text; best values are wrapped in asterisks.
  std::string to_text() const;
  // Header `label,acc,per,rc,latency`.
  std::string to_csv() const;

 private:
  std::vector<ReportRow> rows_;
  ReportOptions options_;
  std::vector<std::array<bool, 4>> best_;
};

ReportTable report_table(std::span<const SessionMetrics> metrics, std::span<const std::string> labels,
                         ReportOptions options = {});

}  // namespace wcst::metrics
