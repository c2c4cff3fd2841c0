// SPDX-License-Identifier: Apache-2.0

#include "itcm/pipeline.hpp"

#include "itcm/channel.hpp"

#include <algorithm>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

namespace itcm {

namespace {

using Clock = std::chrono::steady_clock;

auto seconds_since(Clock::time_point start) -> double {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

auto boundary_after(Timestamp origin, Duration quantum, std::size_t interval)
  -> Timestamp {
  return origin + quantum * static_cast<std::int64_t>(interval + 1);
}

struct FlowBatch {
  std::size_t index = 0;
  std::vector<FlowRecord> flows;
  std::size_t packets = 0;
  std::uint64_t ip_bytes = 0;
  double capture_s = 0.0;
  double reassembly_s = 0.0;
};

/// Expires idle connections on request. Shares the table with the
/// reassembly stage; every table access holds `table_mutex`.
class Reaper {
public:
  Reaper(Reassembler& table, std::mutex& table_mutex, ReapPolicy policy)
    : table_{table}, table_mutex_{table_mutex}, policy_{policy} {
    thread_ = std::thread{[this] { loop(); }};
  }

  Reaper(const Reaper&) = delete;
  auto operator=(const Reaper&) -> Reaper& = delete;

  ~Reaper() {
    {
      auto lock = std::lock_guard{mutex_};
      stop_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }

  /// Reaps at `now` on the reaper thread and waits for the result.
  auto reap_at(Timestamp now) -> std::vector<FlowRecord> {
    auto lock = std::unique_lock{mutex_};
    request_ = now;
    cv_.notify_all();
    cv_.wait(lock, [&] { return result_.has_value(); });
    auto out = std::move(*result_);
    result_.reset();
    return out;
  }

private:
  void loop() {
    auto lock = std::unique_lock{mutex_};
    for (;;) {
      cv_.wait(lock, [&] { return stop_ || request_.has_value(); });
      if (stop_)
        return;
      auto now = *request_;
      request_.reset();
      lock.unlock();
      auto flows = std::vector<FlowRecord>{};
      {
        auto table_lock = std::lock_guard{table_mutex_};
        flows = table_.reap(now, policy_);
      }
      lock.lock();
      result_ = std::move(flows);
      cv_.notify_all();
    }
  }

  Reassembler& table_;
  std::mutex& table_mutex_;
  ReapPolicy policy_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::optional<Timestamp> request_;
  std::optional<std::vector<FlowRecord>> result_;
  bool stop_ = false;
  std::thread thread_;
};

/// First failure of any stage; later ones are ignored.
class FailureSlot {
public:
  void record(std::exception_ptr error) {
    auto lock = std::lock_guard{mutex_};
    if (!error_)
      error_ = std::move(error);
  }

  void rethrow_if_failed() {
    if (error_)
      std::rethrow_exception(error_);
  }

private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

auto stage_error(std::string_view stage, std::size_t interval)
  -> std::exception_ptr {
  auto where = std::string{stage} + " stage failed in interval "
               + std::to_string(interval) + ": ";
  try {
    throw;
  } catch (const pcap::TraceError& e) {
    return std::make_exception_ptr(
      pcap::TraceError{e.kind(), e.offset(), where + e.what()});
  } catch (const std::exception& e) {
    return std::make_exception_ptr(MonitorError{where + e.what()});
  } catch (...) {
    return std::make_exception_ptr(MonitorError{where + "unknown error"});
  }
}

void deliver(const FlowBatch& batch, const FlowLabeller& labeller,
             std::vector<DeliveredFlow>& out,
             const MonitorCallbacks& callbacks) {
  for (const auto& flow : batch.flows) {
    auto d = DeliveredFlow{batch.index, flow, extract(flow), std::nullopt};
    if (labeller)
      d.label = labeller(d.flow, d.features);
    if (callbacks.on_flow)
      callbacks.on_flow(d);
    out.push_back(std::move(d));
  }
}

} // namespace

auto classifier_labeller(const Classifier& model) -> FlowLabeller {
  return [&model](const FlowRecord&, const FeatureVector& features) {
    return std::optional<std::string>{model.predict(features)};
  };
}

auto port_labeller(PortMap map) -> FlowLabeller {
  return [map = std::move(map)](const FlowRecord& flow, const FeatureVector&) {
    return label_flow(flow, map);
  };
}

auto run_monitor(pcap::TraceReader& reader, const MonitorConfig& config,
                 const FlowLabeller& labeller,
                 const MonitorCallbacks& callbacks) -> MonitorResult {
  if (config.quantum <= Duration::zero())
    throw std::invalid_argument{"monitor: quantum must be positive"};
  auto wall_start = Clock::now();
  auto result = MonitorResult{};
  auto failures = FailureSlot{};
  auto packets_in = Channel<IntervalBatch>{config.channel_capacity};
  auto flows_out = Channel<FlowBatch>{config.channel_capacity};
  auto abort_all = [&] {
    packets_in.cancel();
    flows_out.cancel();
  };

  auto table = make_reassembler(config.policy);
  auto table_mutex = std::mutex{};
  auto reaper = Reaper{*table, table_mutex, config.reap};

  auto trace = TraceStats{};
  auto origin = std::optional<Timestamp>{};
  auto last_ts = Timestamp{0};

  auto capture = std::thread{[&] {
    auto batch = IntervalBatch{};
    auto batch_start = Clock::now();
    try {
      auto replay_start = Clock::now();
      while (auto pkt = pcap::next_tcp_packet(reader, result.decode)) {
        if (!origin)
          origin = pkt->ts;
        if (config.paced && pkt->ts > *origin) {
          auto offset = std::chrono::duration<double>(pkt->ts - *origin)
                        / config.pace_speedup;
          std::this_thread::sleep_until(
            replay_start
            + std::chrono::duration_cast<Clock::duration>(offset));
        }
        auto interval = std::max(batch.index,
                                 interval_of(pkt->ts, *origin, config.quantum));
        while (batch.index < interval) {
          batch.capture_s = seconds_since(batch_start);
          auto next_index = batch.index + 1;
          if (!packets_in.push(std::exchange(batch, IntervalBatch{})))
            return;
          batch.index = next_index;
          batch_start = Clock::now();
        }
        ++trace.packets;
        trace.ip_bytes += pkt->ip_total_length;
        last_ts = std::max(last_ts, pkt->ts);
        batch.ip_bytes += pkt->ip_total_length;
        batch.packets.push_back(*pkt);
      }
      if (origin) {
        batch.capture_s = seconds_since(batch_start);
        batch.last = true;
        packets_in.push(std::move(batch));
      }
      packets_in.close();
    } catch (...) {
      failures.record(stage_error("capture", batch.index));
      abort_all();
    }
  }};

  auto reassembly = std::thread{[&] {
    auto index = std::size_t{0};
    try {
      while (auto batch = packets_in.pop()) {
        index = batch->index;
        auto start = Clock::now();
        auto out = FlowBatch{};
        out.index = batch->index;
        out.packets = batch->packets.size();
        out.ip_bytes = batch->ip_bytes;
        out.capture_s = batch->capture_s;
        {
          auto lock = std::lock_guard{table_mutex};
          for (const auto& pkt : batch->packets)
            if (auto event = table->handle_packet(pkt))
              if (auto* done = std::get_if<Concluded>(&*event))
                out.flows.push_back(std::move(done->flow));
        }
        for (auto& f :
             reaper.reap_at(boundary_after(*origin, config.quantum, index)))
          out.flows.push_back(std::move(f));
        if (batch->last) {
          auto lock = std::lock_guard{table_mutex};
          for (auto& f : table->flush())
            out.flows.push_back(std::move(f));
        }
        out.reassembly_s = seconds_since(start);
        if (!flows_out.push(std::move(out)))
          return;
      }
      flows_out.close();
    } catch (...) {
      failures.record(stage_error("reassembly", index));
      abort_all();
    }
  }};

  auto index = std::size_t{0};
  try {
    while (auto batch = flows_out.pop()) {
      index = batch->index;
      auto start = Clock::now();
      deliver(*batch, labeller, result.flows, callbacks);
      auto metrics = make_interval_metrics(
        batch->index, batch->packets, batch->ip_bytes, batch->flows.size(),
        batch->capture_s, batch->reassembly_s, seconds_since(start));
      if (callbacks.on_interval)
        callbacks.on_interval(metrics);
      result.intervals.push_back(metrics);
    }
  } catch (...) {
    failures.record(stage_error("classification", index));
    abort_all();
  }
  capture.join();
  reassembly.join();
  failures.rethrow_if_failed();

  result.dropped_packets = table->dropped();
  result.accepted_packets = trace.packets - result.dropped_packets;
  if (origin)
    trace.span_s = to_seconds(last_ts - *origin);
  trace.wall_s = seconds_since(wall_start);
  result.summary = compute_summary(result.intervals, trace);
  return result;
}

auto run_sequential(pcap::TraceReader& reader, const MonitorConfig& config,
                    const FlowLabeller& labeller) -> MonitorResult {
  if (config.quantum <= Duration::zero())
    throw std::invalid_argument{"monitor: quantum must be positive"};
  auto wall_start = Clock::now();
  auto result = MonitorResult{};
  auto packets = pcap::read_all_packets(reader, result.decode);
  auto trace = TraceStats{};
  if (packets.empty()) {
    trace.wall_s = seconds_since(wall_start);
    result.summary = compute_summary({}, trace);
    return result;
  }

  auto origin = packets.front().ts;
  auto table = make_reassembler(config.policy);
  auto batches = std::vector<FlowBatch>(1);
  auto last_ts = origin;
  for (const auto& pkt : packets) {
    auto interval = std::max(batches.size() - 1,
                             interval_of(pkt.ts, origin, config.quantum));
    while (batches.size() - 1 < interval) {
      auto closing = batches.size() - 1;
      for (auto& f : table->reap(boundary_after(origin, config.quantum,
                                                closing),
                                 config.reap))
        batches.back().flows.push_back(std::move(f));
      batches.emplace_back().index = closing + 1;
    }
    auto& batch = batches.back();
    ++batch.packets;
    batch.ip_bytes += pkt.ip_total_length;
    trace.ip_bytes += pkt.ip_total_length;
    last_ts = std::max(last_ts, pkt.ts);
    if (auto event = table->handle_packet(pkt))
      if (auto* done = std::get_if<Concluded>(&*event))
        batch.flows.push_back(std::move(done->flow));
  }
  auto final_index = batches.size() - 1;
  for (auto& f : table->reap(boundary_after(origin, config.quantum,
                                            final_index),
                             config.reap))
    batches.back().flows.push_back(std::move(f));
  for (auto& f : table->flush())
    batches.back().flows.push_back(std::move(f));

  for (const auto& batch : batches) {
    deliver(batch, labeller, result.flows, {});
    result.intervals.push_back(make_interval_metrics(
      batch.index, batch.packets, batch.ip_bytes, batch.flows.size(), 0.0,
      0.0, 0.0));
  }
  trace.packets = packets.size();
  trace.span_s = to_seconds(last_ts - origin);
  trace.wall_s = seconds_since(wall_start);
  result.dropped_packets = table->dropped();
  result.accepted_packets = trace.packets - result.dropped_packets;
  result.summary = compute_summary(result.intervals, trace);
  return result;
}

auto same_deliveries(std::vector<DeliveredFlow> a,
                     std::vector<DeliveredFlow> b) -> bool {
  if (a.size() != b.size())
    return false;
  auto less = [](const DeliveredFlow& x, const DeliveredFlow& y) {
    if (flow_less(x.flow, y.flow))
      return true;
    if (flow_less(y.flow, x.flow))
      return false;
    return x.label < y.label;
  };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i].flow == b[i].flow) || a[i].label != b[i].label)
      return false;
  return true;
}

} // namespace itcm
