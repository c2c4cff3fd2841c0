// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/metrics.hpp"
#include "itcm/reassembly.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace itcm {

struct PolicyTiming {
  ReassemblyPolicy policy = ReassemblyPolicy::move_to_front;
  /// Wall time of each run.
  std::vector<double> seconds;
  ConfidenceInterval ci;
  std::size_t flows = 0;
};

struct BenchResult {
  PolicyTiming move_to_front;
  PolicyTiming naive_scan;
  std::size_t packets = 0;
  std::size_t runs = 0;
};

/// The two policies disagreed on the flows of the same trace.
class PolicyMismatch : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Order-independent comparison of two flow lists.
auto same_flows(std::vector<FlowRecord> a, std::vector<FlowRecord> b) -> bool;

/// Times `runs` full reassemblies of `packets` per policy, alternating the
/// policies run by run. Throws PolicyMismatch if any run's flows differ from
/// the first move-to-front run.
auto bench_reassembly(std::span<const PacketRecord> packets, std::size_t runs,
                      Duration quantum, const ReapPolicy& reap) -> BenchResult;

auto format_bench(const BenchResult& result) -> std::string;
auto bench_csv(const BenchResult& result) -> std::string;

} // namespace itcm
