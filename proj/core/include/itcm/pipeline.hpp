// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/classifier.hpp"
#include "itcm/features.hpp"
#include "itcm/labelling.hpp"
#include "itcm/metrics.hpp"
#include "itcm/pcap.hpp"
#include "itcm/reassembly.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace itcm {

struct MonitorConfig {
  Duration quantum = std::chrono::seconds{30};
  ReapPolicy reap;
  ReassemblyPolicy policy = ReassemblyPolicy::move_to_front;
  /// Replay packets with their original inter-arrival gaps.
  bool paced = false;
  /// Divides the replay gaps in paced mode.
  double pace_speedup = 1.0;
  std::size_t channel_capacity = 4;
};

/// Packets of one capture quantum: timestamps in
/// [origin + quantum * index, origin + quantum * (index + 1)).
struct IntervalBatch {
  std::size_t index = 0;
  std::vector<PacketRecord> packets;
  std::uint64_t ip_bytes = 0;
  double capture_s = 0.0;
  bool last = false;
};

struct DeliveredFlow {
  std::size_t interval = 0;
  FlowRecord flow;
  FeatureVector features{};
  std::optional<std::string> label;
};

/// Assigns the label of a delivered flow: a trained classifier in
/// classification mode, the port map in training mode.
using FlowLabeller = std::function<std::optional<std::string>(
  const FlowRecord&, const FeatureVector&)>;

/// `model` must outlive the returned labeller.
auto classifier_labeller(const Classifier& model) -> FlowLabeller;
auto port_labeller(PortMap map) -> FlowLabeller;

struct MonitorCallbacks {
  std::function<void(const IntervalMetrics&)> on_interval;
  std::function<void(const DeliveredFlow&)> on_flow;
};

struct MonitorResult {
  std::vector<DeliveredFlow> flows;
  std::vector<IntervalMetrics> intervals;
  MonitorSummary summary;
  pcap::DecodeCounters decode;
  std::uint64_t accepted_packets = 0;
  std::uint64_t dropped_packets = 0;
};

/// A pipeline stage failed; the message names the stage and interval.
class MonitorError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Three-stage pipelined monitor. Capture buckets packets into quanta by
/// capture timestamp relative to the first packet; reassembly consumes
/// quantum i - 1 while capture fills quantum i, and classification handles
/// the flows of quantum i - 2. A reaper thread expires idle connections at
/// every quantum boundary, and the table is flushed at end of trace.
auto run_monitor(pcap::TraceReader& reader, const MonitorConfig& config,
                 const FlowLabeller& labeller,
                 const MonitorCallbacks& callbacks = {}) -> MonitorResult;

/// Single-threaded reference with the same batching and reap schedule: read
/// everything, reassemble everything, then label everything.
auto run_sequential(pcap::TraceReader& reader, const MonitorConfig& config,
                    const FlowLabeller& labeller) -> MonitorResult;

/// Order-independent comparison of (flow, label) outputs.
auto same_deliveries(std::vector<DeliveredFlow> a,
                     std::vector<DeliveredFlow> b) -> bool;

} // namespace itcm
