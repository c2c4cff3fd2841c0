// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace itcm {

/// Timing and delivery figures for one capture quantum.
struct IntervalMetrics {
  std::size_t index = 0;
  std::size_t packets = 0;
  /// Sum of IP total lengths of the quantum's packets.
  std::uint64_t ip_bytes = 0;
  std::size_t flows = 0;
  /// T_CO: wall time of the capture stage for the quantum.
  double capture_s = 0.0;
  /// T_RE: wall time of reassembly, reaping included.
  double reassembly_s = 0.0;
  /// Feature extraction plus classification.
  double classify_s = 0.0;
  /// alpha: reassembly + features + classification.
  double delivery_delay_s = 0.0;
  double reassembly_fps = 0.0;
  double capture_reassembly_fps = 0.0;
  /// Megabits of the quantum divided by (T_CO + T_RE).
  double rate_mbps = 0.0;
};

/// count / seconds; 0 when both are 0.
auto throughput(double count, double seconds) -> double;

/// Fills the derived fields from the measured ones.
auto make_interval_metrics(std::size_t index, std::size_t packets,
                           std::uint64_t ip_bytes, std::size_t flows,
                           double capture_s, double reassembly_s,
                           double classify_s) -> IntervalMetrics;

struct TraceStats {
  std::uint64_t packets = 0;
  std::uint64_t ip_bytes = 0;
  /// Capture time covered by the trace, last minus first timestamp.
  double span_s = 0.0;
  /// Wall time of the whole monitor run.
  double wall_s = 0.0;
};

struct MonitorSummary {
  std::size_t intervals = 0;
  std::size_t flows = 0;
  std::uint64_t packets = 0;
  double trace_capture_rate_mbps = 0.0;
  double max_capture_reassembly_fps = 0.0;
  double max_reassembly_fps = 0.0;
  double avg_capture_reassembly_rate_mbps = 0.0;
  /// Mean alpha (reassembly + features + classification).
  double avg_delivery_delay_s = 0.0;
  double max_delivery_delay_s = 0.0;
  /// Mean T_RE alone.
  double avg_reassembly_delay_s = 0.0;
  double total_monitor_time_s = 0.0;
};

auto compute_summary(std::span<const IntervalMetrics> intervals,
                     const TraceStats& trace) -> MonitorSummary;

/// Plain-text tables with stable column order.
auto format_interval_table(std::span<const IntervalMetrics> intervals)
  -> std::string;
auto format_summary(const MonitorSummary& summary) -> std::string;
auto interval_csv(std::span<const IntervalMetrics> intervals) -> std::string;
auto summary_csv(const MonitorSummary& summary) -> std::string;

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Sample mean and two-sided 95% Student-t half-width. Needs >= 2 samples.
auto mean_ci95(std::span<const double> samples) -> ConfidenceInterval;

} // namespace itcm
