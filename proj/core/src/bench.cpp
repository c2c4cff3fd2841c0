// SPDX-License-Identifier: Apache-2.0

#include "itcm/bench.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>

namespace itcm {

namespace {

auto policy_title(ReassemblyPolicy p) -> const char* {
  return p == ReassemblyPolicy::move_to_front ? "Recently accessed first"
                                              : "Full scan, no reordering";
}

} // namespace

auto same_flows(std::vector<FlowRecord> a, std::vector<FlowRecord> b) -> bool {
  if (a.size() != b.size())
    return false;
  std::sort(a.begin(), a.end(), flow_less);
  std::sort(b.begin(), b.end(), flow_less);
  return a == b;
}

auto bench_reassembly(std::span<const PacketRecord> packets, std::size_t runs,
                      Duration quantum, const ReapPolicy& reap)
  -> BenchResult {
  if (runs < 2)
    throw std::invalid_argument{"bench: at least 2 runs are needed"};
  auto result = BenchResult{};
  result.packets = packets.size();
  result.runs = runs;
  result.move_to_front.policy = ReassemblyPolicy::move_to_front;
  result.naive_scan.policy = ReassemblyPolicy::naive_scan;

  auto reference = std::vector<FlowRecord>{};
  auto one_run = [&](PolicyTiming& timing, std::size_t run) {
    auto table = make_reassembler(timing.policy);
    auto start = std::chrono::steady_clock::now();
    auto flows = reassemble_all(*table, packets, quantum, reap);
    timing.seconds.push_back(std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count());
    timing.flows = flows.size();
    if (run == 0 && timing.policy == ReassemblyPolicy::move_to_front) {
      std::sort(flows.begin(), flows.end(), flow_less);
      reference = std::move(flows);
    } else if (!same_flows(std::move(flows), reference)) {
      throw PolicyMismatch{fmt::format(
        "bench: {} run {} produced different flows than move_to_front",
        to_string(timing.policy), run)};
    }
  };
  for (std::size_t run = 0; run < runs; ++run) {
    one_run(result.move_to_front, run);
    one_run(result.naive_scan, run);
  }
  result.move_to_front.ci = mean_ci95(result.move_to_front.seconds);
  result.naive_scan.ci = mean_ci95(result.naive_scan.seconds);
  return result;
}

auto format_bench(const BenchResult& r) -> std::string {
  auto out = std::string{"Performance Comparison of Reassembly Policies\n"};
  out += fmt::format("packets {}, runs {} per policy, 95% confidence\n",
                     r.packets, r.runs);
  out += fmt::format("{:<26} {:<14} {:>26} {:>10}\n", "Policy", "Name",
                     "Time (s)", "Flows");
  for (const auto* t : {&r.move_to_front, &r.naive_scan})
    out += fmt::format("{:<26} {:<14} {:>26} {:>10}\n", policy_title(t->policy),
                       to_string(t->policy),
                       fmt::format("{:.6f} +/- {:.6f}", t->ci.mean,
                                   t->ci.half_width),
                       t->flows);
  return out;
}

auto bench_csv(const BenchResult& r) -> std::string {
  auto out = std::string{"policy,runs,packets,mean_s,half_width_s,flows\n"};
  for (const auto* t : {&r.move_to_front, &r.naive_scan})
    out += fmt::format("{},{},{},{},{},{}\n", to_string(t->policy), r.runs,
                       r.packets, t->ci.mean, t->ci.half_width, t->flows);
  return out;
}

} // namespace itcm
