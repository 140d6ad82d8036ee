#include "wcstlab/metrics/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wcstlab/errors.hpp"

namespace wcst::metrics {

namespace {

std::string fmt_rc(double rc) {
  return rc == std::floor(rc) ? fmt::format("{:.0f}", rc) : fmt::format("{:.2f}", rc);
}

std::string fmt_per(const std::optional<double>& per) {
  return per ? fmt::format("{:.2f}", *per) : "-";
}

}  // namespace

ReportRow to_row(const std::string& label, const SessionMetrics& m) {
  return ReportRow{label, m.acc, m.per, static_cast<double>(m.rc), m.mean_latency};
}

ReportRow aggregate(const std::string& label, std::span<const SessionMetrics> sessions) {
  if (sessions.empty()) throw EmptyInputError("aggregate: no sessions");
  ReportRow row;
  row.label = label;
  double per_sum = 0.0;
  int per_n = 0;
  for (const auto& s : sessions) {
    row.acc += s.acc;
    row.rc += s.rc;
    row.latency += s.mean_latency;
    if (s.per) {
      per_sum += *s.per;
      ++per_n;
    }
  }
  const auto n = static_cast<double>(sessions.size());
  row.acc /= n;
  row.rc /= n;
  row.latency /= n;
  if (per_n > 0) row.per = per_sum / per_n;
  return row;
}

ReportTable::ReportTable(std::vector<ReportRow> rows, ReportOptions options)
    : rows_(std::move(rows)), options_(options), best_(rows_.size()) {
  constexpr double eps = 1e-9;
  auto mark = [&](Column col, auto value_of, bool higher_better) {
    std::optional<double> best;
    for (const auto& r : rows_) {
      const auto v = value_of(r);
      if (!v) continue;
      if (!best || (higher_better ? *v > *best : *v < *best)) best = v;
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto v = value_of(rows_[i]);
      best_[i][col] = best && v && std::abs(*v - *best) <= eps;
    }
  };
  mark(kAcc, [](const ReportRow& r) { return std::optional<double>(r.acc); }, true);
  mark(kPer, [](const ReportRow& r) { return r.per; }, options_.per_higher_is_better);
  mark(kRc, [](const ReportRow& r) { return std::optional<double>(r.rc); }, true);
  mark(kLatency, [](const ReportRow& r) { return std::optional<double>(r.latency); }, false);
}

std::string ReportTable::to_text() const {
  const char* per_arrow = options_.per_higher_is_better ? "^" : "v";
  std::size_t label_w = 12;
  for (const auto& r : rows_) label_w = std::max(label_w, r.label.size() + 2);
  auto cell = [](const std::string& v, bool best) { return best ? "*" + v + "*" : v; };
  std::string out = fmt::format("{:<{}}{:>10}{:>10}{:>10}{:>12}\n", "", label_w, "ACC ^",
                                fmt::format("PER {}", per_arrow), "#RC ^", "Latency v");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    out += fmt::format("{:<{}}{:>10}{:>10}{:>10}{:>12}\n", r.label, label_w,
                       cell(fmt::format("{:.1f}", r.acc), best_[i][kAcc]), cell(fmt_per(r.per), best_[i][kPer]),
                       cell(fmt_rc(r.rc), best_[i][kRc]),
                       cell(fmt::format("{:.2f}", r.latency), best_[i][kLatency]));
  }
  out += "* marks the best value in each column.\n";
  return out;
}

std::string ReportTable::to_csv() const {
  std::string out = "label,acc,per,rc,latency\n";
  for (const auto& r : rows_) {
    out += fmt::format("{},{:.1f},{},{},{:.2f}\n", r.label, r.acc, r.per ? fmt::format("{:.2f}", *r.per) : "",
                       fmt_rc(r.rc), r.latency);
  }
  return out;
}

ReportTable report_table(std::span<const SessionMetrics> metrics, std::span<const std::string> labels,
                         ReportOptions options) {
  if (metrics.empty()) throw EmptyInputError("report_table: no entries");
  if (metrics.size() != labels.size()) throw InputError("report_table: label count mismatch");
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < metrics.size(); ++i) rows.push_back(to_row(labels[i], metrics[i]));
  return ReportTable(std::move(rows), options);
}

}  // namespace wcst::metrics
