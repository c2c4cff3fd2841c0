// SPDX-License-Identifier: Apache-2.0

#include "itcm/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace itcm {

auto throughput(double count, double seconds) -> double {
  if (seconds <= 0.0)
    return count == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return count / seconds;
}

auto make_interval_metrics(std::size_t index, std::size_t packets,
                           std::uint64_t ip_bytes, std::size_t flows,
                           double capture_s, double reassembly_s,
                           double classify_s) -> IntervalMetrics {
  auto m = IntervalMetrics{};
  m.index = index;
  m.packets = packets;
  m.ip_bytes = ip_bytes;
  m.flows = flows;
  m.capture_s = capture_s;
  m.reassembly_s = reassembly_s;
  m.classify_s = classify_s;
  m.delivery_delay_s = reassembly_s + classify_s;
  auto n = static_cast<double>(flows);
  m.reassembly_fps = throughput(n, reassembly_s);
  m.capture_reassembly_fps = throughput(n, capture_s + reassembly_s);
  m.rate_mbps = throughput(static_cast<double>(ip_bytes) * 8.0 / 1e6,
                           capture_s + reassembly_s);
  return m;
}

auto compute_summary(std::span<const IntervalMetrics> intervals,
                     const TraceStats& trace) -> MonitorSummary {
  auto s = MonitorSummary{};
  s.intervals = intervals.size();
  s.packets = trace.packets;
  s.total_monitor_time_s = trace.wall_s;
  s.trace_capture_rate_mbps
    = trace.span_s > 0.0
        ? static_cast<double>(trace.ip_bytes) * 8.0 / 1e6 / trace.span_s
        : 0.0;
  if (intervals.empty())
    return s;
  for (const auto& m : intervals) {
    s.flows += m.flows;
    s.max_capture_reassembly_fps
      = std::max(s.max_capture_reassembly_fps, m.capture_reassembly_fps);
    s.max_reassembly_fps = std::max(s.max_reassembly_fps, m.reassembly_fps);
    s.max_delivery_delay_s
      = std::max(s.max_delivery_delay_s, m.delivery_delay_s);
    s.avg_capture_reassembly_rate_mbps += m.rate_mbps;
    s.avg_delivery_delay_s += m.delivery_delay_s;
    s.avg_reassembly_delay_s += m.reassembly_s;
  }
  auto n = static_cast<double>(intervals.size());
  s.avg_capture_reassembly_rate_mbps /= n;
  s.avg_delivery_delay_s /= n;
  s.avg_reassembly_delay_s /= n;
  return s;
}

auto format_interval_table(std::span<const IntervalMetrics> intervals)
  -> std::string {
  auto out = fmt::format("{:>8} {:>9} {:>12} {:>7} {:>10} {:>10} {:>10} "
                         "{:>10} {:>14} {:>14} {:>12}\n",
                         "interval", "packets", "ip_bytes", "flows", "T_CO_s",
                         "T_RE_s", "class_s", "alpha_s", "reasm_fps",
                         "cap+reasm_fps", "rate_mbps");
  for (const auto& m : intervals)
    out += fmt::format("{:>8} {:>9} {:>12} {:>7} {:>10.6f} {:>10.6f} "
                       "{:>10.6f} {:>10.6f} {:>14.2f} {:>14.2f} {:>12.2f}\n",
                       m.index, m.packets, m.ip_bytes, m.flows, m.capture_s,
                       m.reassembly_s, m.classify_s, m.delivery_delay_s,
                       m.reassembly_fps, m.capture_reassembly_fps,
                       m.rate_mbps);
  return out;
}

auto format_summary(const MonitorSummary& s) -> std::string {
  auto row = [](std::string_view metric, const std::string& value) {
    return fmt::format("{:<42} {}\n", metric, value);
  };
  auto out = std::string{"Performance of Monitoring and Reassembly Processes\n"};
  out += row("Metric", "Value");
  out += row("TCP Connections Number", fmt::format("{}", s.flows));
  out += row("Intervals", fmt::format("{}", s.intervals));
  out += row("Average Capture Rate",
             fmt::format("{:.2f} Mbps", s.trace_capture_rate_mbps));
  out += row("Max Capture & Reassembly Throughput",
             fmt::format("{:.2f} fps", s.max_capture_reassembly_fps));
  out += row("Max Reassembly Throughput",
             fmt::format("{:.2f} fps", s.max_reassembly_fps));
  out += row("Average Capture & Reassembly Rate",
             fmt::format("{:.2f} Mbps", s.avg_capture_reassembly_rate_mbps));
  out += row("Average Delivery Delay",
             fmt::format("{:.6f}s", s.avg_delivery_delay_s));
  out += row("Average Reassembly Delay (reassembly only)",
             fmt::format("{:.6f}s", s.avg_reassembly_delay_s));
  out += row("Max Delivery Delay",
             fmt::format("{:.6f}s", s.max_delivery_delay_s));
  out += row("Total Monitor Time",
             fmt::format("{:.6f}s", s.total_monitor_time_s));
  return out;
}

auto interval_csv(std::span<const IntervalMetrics> intervals) -> std::string {
  auto out = std::string{
    "interval,packets,ip_bytes,flows,capture_s,reassembly_s,classify_s,"
    "delivery_delay_s,reassembly_fps,capture_reassembly_fps,rate_mbps\n"};
  for (const auto& m : intervals)
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", m.index,
                       m.packets, m.ip_bytes, m.flows, m.capture_s,
                       m.reassembly_s, m.classify_s, m.delivery_delay_s,
                       m.reassembly_fps, m.capture_reassembly_fps,
                       m.rate_mbps);
  return out;
}

auto summary_csv(const MonitorSummary& s) -> std::string {
  return fmt::format(
    "metric,value\n"
    "tcp_connections,{}\nintervals,{}\npackets,{}\n"
    "average_capture_rate_mbps,{}\n"
    "max_capture_reassembly_fps,{}\nmax_reassembly_fps,{}\n"
    "average_capture_reassembly_rate_mbps,{}\n"
    "average_delivery_delay_s,{}\naverage_reassembly_delay_s,{}\n"
    "max_delivery_delay_s,{}\ntotal_monitor_time_s,{}\n",
    s.flows, s.intervals, s.packets, s.trace_capture_rate_mbps,
    s.max_capture_reassembly_fps, s.max_reassembly_fps,
    s.avg_capture_reassembly_rate_mbps, s.avg_delivery_delay_s,
    s.avg_reassembly_delay_s, s.max_delivery_delay_s,
    s.total_monitor_time_s);
}

auto mean_ci95(std::span<const double> samples) -> ConfidenceInterval {
  if (samples.size() < 2)
    throw std::invalid_argument{"confidence interval needs at least 2 samples"};
  auto n = static_cast<double>(samples.size());
  auto mean = 0.0;
  for (auto x : samples)
    mean += x;
  mean /= n;
  auto ss = 0.0;
  for (auto x : samples)
    ss += (x - mean) * (x - mean);
  auto sd = std::sqrt(ss / (n - 1.0));
  auto dist = boost::math::students_t_distribution<double>{n - 1.0};
  auto t = boost::math::quantile(boost::math::complement(dist, 0.025));
  return {mean, t * sd / std::sqrt(n)};
}

} // namespace itcm
