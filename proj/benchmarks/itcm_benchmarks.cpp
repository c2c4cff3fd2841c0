// SPDX-License-Identifier: Apache-2.0

#include "itcm/classifier.hpp"
#include "itcm/features.hpp"
#include "itcm/pcap.hpp"
#include "itcm/reassembly.hpp"
#include "itcm/synth.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <sstream>

namespace {

using namespace itcm;

auto trace(std::size_t packets) -> const std::vector<PacketRecord>& {
  static auto cache = std::map<std::size_t, std::vector<PacketRecord>>{};
  auto& t = cache[packets];
  if (t.empty()) {
    auto cfg = SynthConfig{};
    cfg.min_packets = packets;
    cfg.span_seconds = 600;
    t = generate_trace(cfg);
  }
  return t;
}

void BM_Reassembly(benchmark::State& state, ReassemblyPolicy policy) {
  const auto& packets = trace(static_cast<std::size_t>(state.range(0)));
  auto flows = std::size_t{0};
  for (auto _ : state) {
    auto table = make_reassembler(policy);
    auto out = reassemble_all(*table, packets, std::chrono::seconds{30},
                              ReapPolicy{});
    flows = out.size();
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations()
                          * static_cast<std::int64_t>(packets.size()));
  state.counters["flows"] = static_cast<double>(flows);
}
BENCHMARK_CAPTURE(BM_Reassembly, move_to_front, ReassemblyPolicy::move_to_front)
  ->Arg(20'000)
  ->Arg(100'000)
  ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Reassembly, naive_scan, ReassemblyPolicy::naive_scan)
  ->Arg(20'000)
  ->Arg(100'000)
  ->Unit(benchmark::kMillisecond);

void BM_DecodeTrace(benchmark::State& state) {
  auto bytes = std::ostringstream{};
  pcap::write_trace(bytes, trace(20'000), {});
  auto text = bytes.str();
  for (auto _ : state) {
    auto reader = pcap::TraceReader{std::make_unique<std::istringstream>(text),
                                    "bench"};
    auto counters = pcap::DecodeCounters{};
    auto packets = pcap::read_all_packets(reader, counters);
    benchmark::DoNotOptimize(packets.data());
  }
  state.SetBytesProcessed(state.iterations()
                          * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_DecodeTrace)->Unit(benchmark::kMillisecond);

void BM_Extract(benchmark::State& state) {
  auto table = make_reassembler(ReassemblyPolicy::move_to_front);
  auto flows = reassemble_all(*table, trace(20'000), std::chrono::seconds{30},
                              ReapPolicy{});
  for (auto _ : state)
    for (const auto& f : flows)
      benchmark::DoNotOptimize(extract(f));
  state.SetItemsProcessed(state.iterations()
                          * static_cast<std::int64_t>(flows.size()));
}
BENCHMARK(BM_Extract);

void BM_Predict(benchmark::State& state, Algorithm algorithm) {
  auto table = make_reassembler(ReassemblyPolicy::move_to_front);
  auto flows = reassemble_all(*table, trace(20'000), std::chrono::seconds{30},
                              ReapPolicy{});
  auto rows = std::vector<std::vector<double>>{};
  auto labels = std::vector<std::string>{};
  for (const auto& f : flows) {
    auto x = extract(f);
    rows.emplace_back(x.begin(), x.end());
    labels.push_back(std::to_string(f.responder.port % 5));
  }
  auto spec = LearnerSpec{};
  spec.algorithm = algorithm;
  auto model = train(Dataset::from_rows(rows, labels), spec);
  for (auto _ : state)
    for (const auto& x : rows)
      benchmark::DoNotOptimize(model->predict_index(x));
  state.SetItemsProcessed(state.iterations()
                          * static_cast<std::int64_t>(rows.size()));
}
BENCHMARK_CAPTURE(BM_Predict, c45, Algorithm::c45)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Predict, adaboost, Algorithm::adaboost)
  ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Predict, knn, Algorithm::knn)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Predict, nb, Algorithm::nb)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Predict, knb, Algorithm::knb)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
