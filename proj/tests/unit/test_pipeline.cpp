// SPDX-License-Identifier: Apache-2.0

#include "itcm/classifier.hpp"
#include "itcm/pipeline.hpp"
#include "itcm/synth.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numeric>

namespace itcm {
namespace {

using testing::make_packet;

const auto client = Endpoint{0x0a000001, 40000};
const auto server = Endpoint{0xc0a80001, 80};

auto port_labels() -> FlowLabeller {
  return port_labeller(PortMap::defaults());
}

auto short_session(double t, Endpoint c) -> std::vector<PacketRecord> {
  return {make_packet(t, c, server, {.syn = true}),
          make_packet(t + 0.01, server, c, {.syn = true, .ack = true}),
          make_packet(t + 0.02, c, server, {.ack = true}, 100),
          make_packet(t + 0.03, c, server, {.ack = true, .fin = true})};
}

auto monitor(std::span<const PacketRecord> packets,
             const MonitorConfig& config = {}) -> MonitorResult {
  auto reader = testing::reader_for(packets);
  return run_monitor(reader, config, port_labels());
}

auto sequential(std::span<const PacketRecord> packets,
                const MonitorConfig& config = {}) -> MonitorResult {
  auto reader = testing::reader_for(packets);
  return run_sequential(reader, config, port_labels());
}

TEST(Pipeline, NinetySecondsMakeThreeIntervals) {
  auto packets = short_session(0, client);
  auto later = short_session(45, Endpoint{client.ip, 40001});
  auto last = short_session(89.9, Endpoint{client.ip, 40002});
  packets.insert(packets.end(), later.begin(), later.end());
  packets.insert(packets.end(), last.begin(), last.end());
  auto r = monitor(packets);
  ASSERT_EQ(r.intervals.size(), 3u);
  EXPECT_EQ(r.flows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r.intervals[i].index, i);
    EXPECT_EQ(r.intervals[i].flows, 1u);
    EXPECT_EQ(r.flows[i].interval, i);
    EXPECT_EQ(r.flows[i].label, "www-http");
  }
}

TEST(Pipeline, EmptyQuantaStillReport) {
  auto packets = short_session(0, client);
  auto last = short_session(65, Endpoint{client.ip, 40001});
  packets.insert(packets.end(), last.begin(), last.end());
  auto r = monitor(packets);
  ASSERT_EQ(r.intervals.size(), 3u);
  EXPECT_EQ(r.intervals[1].packets, 0u);
  EXPECT_EQ(r.intervals[1].flows, 0u);
}

TEST(Pipeline, EmptyTrace) {
  auto r = monitor({});
  EXPECT_TRUE(r.intervals.empty());
  EXPECT_TRUE(r.flows.empty());
  EXPECT_EQ(r.summary.flows, 0u);
}

TEST(Pipeline, IdleFlowIsDeliveredWithTheReapingBatch) {
  // Opened at 0, silent afterwards; idle for more than 60 s only after the
  // boundary at 90 s.
  auto packets = std::vector{
    make_packet(0, client, server, {.syn = true}),
    make_packet(0.1, server, client, {.syn = true, .ack = true}),
    make_packet(100, Endpoint{client.ip, 40005}, server, {.syn = true})};
  auto r = monitor(packets);
  ASSERT_EQ(r.flows.size(), 2u);
  EXPECT_EQ(r.flows[0].interval, 2u);
  EXPECT_EQ(r.flows[0].flow.reason, ConclusionReason::timeout);
  EXPECT_EQ(r.flows[1].flow.reason, ConclusionReason::flush);
}

TEST(Pipeline, EveryPacketInExactlyOneBatch) {
  auto cfg = SynthConfig{};
  cfg.sessions = 150;
  cfg.seed = 12;
  auto packets = generate_trace(cfg);
  auto r = monitor(packets);
  auto batched = std::accumulate(
    r.intervals.begin(), r.intervals.end(), std::size_t{0},
    [](std::size_t s, const IntervalMetrics& m) { return s + m.packets; });
  EXPECT_EQ(batched, packets.size());
  EXPECT_EQ(r.accepted_packets + r.dropped_packets, packets.size());
  auto bytes = std::uint64_t{0};
  for (const auto& p : packets)
    bytes += p.ip_total_length;
  auto batched_bytes = std::uint64_t{0};
  for (const auto& m : r.intervals)
    batched_bytes += m.ip_bytes;
  EXPECT_EQ(batched_bytes, bytes);
}

TEST(Pipeline, MatchesSequentialReference) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto cfg = SynthConfig{};
    cfg.sessions = 120;
    cfg.seed = seed;
    auto packets = generate_trace(cfg);
    auto mc = MonitorConfig{};
    mc.quantum = std::chrono::seconds{20};
    mc.reap.timeout = std::chrono::seconds{15};
    auto a = monitor(packets, mc);
    auto b = sequential(packets, mc);
    EXPECT_TRUE(same_deliveries(a.flows, b.flows)) << "seed " << seed;
    EXPECT_EQ(a.intervals.size(), b.intervals.size());
    EXPECT_EQ(a.dropped_packets, b.dropped_packets);
  }
}

TEST(Pipeline, BothPoliciesDeliverTheSameFlows) {
  auto cfg = SynthConfig{};
  cfg.sessions = 100;
  auto packets = generate_trace(cfg);
  auto mc = MonitorConfig{};
  mc.policy = ReassemblyPolicy::naive_scan;
  EXPECT_TRUE(same_deliveries(monitor(packets).flows, monitor(packets, mc).flows));
}

TEST(Pipeline, PacedReplayMatchesFastMode) {
  auto cfg = SynthConfig{};
  cfg.sessions = 40;
  cfg.span_seconds = 60;
  auto packets = generate_trace(cfg);
  auto mc = MonitorConfig{};
  mc.paced = true;
  mc.pace_speedup = 400.0;
  auto paced = monitor(packets, mc);
  EXPECT_TRUE(same_deliveries(paced.flows, monitor(packets).flows));
}

TEST(Pipeline, CallbacksSeeEveryIntervalAndFlow) {
  auto packets = generate_trace(SynthConfig::clean(30, 2));
  auto intervals = std::size_t{0};
  auto flows = std::size_t{0};
  auto reader = testing::reader_for(packets);
  auto r = run_monitor(reader, {}, port_labels(),
                       {[&](const IntervalMetrics&) { ++intervals; },
                        [&](const DeliveredFlow&) { ++flows; }});
  EXPECT_EQ(intervals, r.intervals.size());
  EXPECT_EQ(flows, r.flows.size());
  EXPECT_EQ(flows, 30u);
}

TEST(Pipeline, ClassifierLabels) {
  auto model = train(Dataset::from_rows({{0}}, {"only"}), LearnerSpec{});
  // A one-feature model cannot take 14 features: that is a stage failure.
  auto reader = testing::reader_for(short_session(0, client));
  EXPECT_THROW(run_monitor(reader, {}, classifier_labeller(*model)),
               MonitorError);
}

TEST(Pipeline, FailingLabellerNamesStage) {
  auto reader = testing::reader_for(short_session(0, client));
  auto failing = FlowLabeller{
    [](const FlowRecord&, const FeatureVector&) -> std::optional<std::string> {
      throw std::runtime_error{"boom"};
    }};
  try {
    run_monitor(reader, {}, failing);
    FAIL() << "expected MonitorError";
  } catch (const MonitorError& e) {
    auto what = std::string{e.what()};
    EXPECT_NE(what.find("interval 0"), std::string::npos) << what;
    EXPECT_NE(what.find("boom"), std::string::npos) << what;
  }
}

TEST(Pipeline, TruncatedTraceIsTraceError) {
  auto out = std::ostringstream{};
  pcap::write_trace(out, short_session(0, client), {});
  auto bytes = out.str();
  bytes.resize(bytes.size() - 10);
  auto reader = testing::reader_for_bytes(bytes);
  EXPECT_THROW(run_monitor(reader, {}, port_labels()), pcap::TraceError);
}

} // namespace
} // namespace itcm
