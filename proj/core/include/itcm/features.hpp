// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/flow.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace itcm {

inline constexpr std::size_t per_direction_features = 7;
inline constexpr std::size_t feature_count = 2 * per_direction_features;

/// The 14 flow discriminators: seven uplink statistics followed by the same
/// seven for the downlink.
using FeatureVector = std::array<double, feature_count>;

inline constexpr std::array<std::string_view, feature_count> feature_names{
  "up_duration",        "up_pkts",
  "up_bytes",           "up_payload_pkts",
  "up_push_pkts",       "up_median_ip_bytes",
  "up_var_ip_bytes",    "down_duration",
  "down_pkts",          "down_bytes",
  "down_payload_pkts",  "down_push_pkts",
  "down_median_ip_bytes", "down_var_ip_bytes",
};

/// Median; even-sized samples average the two central values. 0 when empty.
auto median(std::span<const std::uint16_t> samples) -> double;

/// Two-pass population variance (divides by n). 0 for fewer than 2 samples.
auto population_variance(std::span<const std::uint16_t> samples) -> double;

/// duration, packets, bytes, payload packets, push packets, median, variance.
auto direction_features(const DirectionStats& dir)
  -> std::array<double, per_direction_features>;

auto extract(const FlowRecord& flow) -> FeatureVector;

} // namespace itcm
