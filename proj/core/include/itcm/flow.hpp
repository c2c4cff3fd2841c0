// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/packet.hpp"

#include <compare>
#include <cstdint>
#include <string_view>
#include <vector>

namespace itcm {

/// Direction-free identity of a TCP conversation: the smaller endpoint first.
struct FlowKey {
  Endpoint low;
  Endpoint high;

  static auto of(const PacketRecord& pkt) -> FlowKey {
    return pkt.src < pkt.dst ? FlowKey{pkt.src, pkt.dst}
                             : FlowKey{pkt.dst, pkt.src};
  }

  friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

enum class ConclusionReason { fin_rst, timeout, flush };

auto to_string(ConclusionReason reason) -> std::string_view;

/// Per-direction accumulators of a connection.
struct DirectionStats {
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  std::uint64_t payload_packets = 0;
  std::uint64_t push_packets = 0;
  std::vector<std::uint16_t> ip_sizes;
  Timestamp first{0};
  Timestamp last{0};

  void add(const PacketRecord& pkt);

  friend auto operator==(const DirectionStats&, const DirectionStats&) -> bool
    = default;
};

/// A bidirectional TCP flow. Uplink is initiator to responder.
struct FlowRecord {
  FlowKey key;
  Endpoint initiator;
  Endpoint responder;
  Timestamp first_ts{0};
  Timestamp last_ts{0};
  DirectionStats up;
  DirectionStats down;
  ConclusionReason reason = ConclusionReason::flush;

  /// Starts a flow from its first packet; the packet source is the initiator.
  static auto open(const PacketRecord& first) -> FlowRecord;

  /// Adds a packet belonging to this flow to the matching direction.
  void accumulate(const PacketRecord& pkt);

  auto packets() const -> std::uint64_t {
    return up.packets + down.packets;
  }

  friend auto operator==(const FlowRecord&, const FlowRecord&) -> bool
    = default;
};

/// Total order used to compare flow multisets regardless of emission order.
auto flow_less(const FlowRecord& a, const FlowRecord& b) -> bool;

} // namespace itcm
