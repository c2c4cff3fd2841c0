// SPDX-License-Identifier: Apache-2.0

#include "itcm/features.hpp"

#include <algorithm>
#include <vector>

namespace itcm {

auto median(std::span<const std::uint16_t> samples) -> double {
  if (samples.empty())
    return 0.0;
  auto sorted = std::vector<std::uint16_t>(samples.begin(), samples.end());
  auto mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(mid),
                   sorted.end());
  auto upper = static_cast<double>(sorted[mid]);
  if (sorted.size() % 2 == 1)
    return upper;
  auto lower = static_cast<double>(
    *std::max_element(sorted.begin(), sorted.begin() + static_cast<long>(mid)));
  return (lower + upper) / 2.0;
}

auto population_variance(std::span<const std::uint16_t> samples) -> double {
  if (samples.size() < 2)
    return 0.0;
  auto n = static_cast<double>(samples.size());
  auto sum = 0.0;
  for (auto v : samples)
    sum += v;
  auto mean = sum / n;
  auto ss = 0.0;
  for (auto v : samples) {
    auto d = v - mean;
    ss += d * d;
  }
  return ss / n;
}

auto direction_features(const DirectionStats& dir)
  -> std::array<double, per_direction_features> {
  if (dir.packets == 0)
    return {};
  return {
    to_seconds(dir.last - dir.first),
    static_cast<double>(dir.packets),
    static_cast<double>(dir.bytes),
    static_cast<double>(dir.payload_packets),
    static_cast<double>(dir.push_packets),
    median(dir.ip_sizes),
    population_variance(dir.ip_sizes),
  };
}

auto extract(const FlowRecord& flow) -> FeatureVector {
  auto out = FeatureVector{};
  auto up = direction_features(flow.up);
  auto down = direction_features(flow.down);
  std::copy(up.begin(), up.end(), out.begin());
  std::copy(down.begin(), down.end(), out.begin() + per_direction_features);
  return out;
}

} // namespace itcm
