// SPDX-License-Identifier: Apache-2.0

#include "itcm/flow.hpp"

#include <algorithm>
#include <tuple>

namespace itcm {

auto format_ipv4(std::uint32_t ip) -> std::string {
  return std::to_string(ip >> 24) + '.' + std::to_string((ip >> 16) & 0xff)
         + '.' + std::to_string((ip >> 8) & 0xff) + '.'
         + std::to_string(ip & 0xff);
}

auto to_string(const Endpoint& ep) -> std::string {
  return format_ipv4(ep.ip) + ':' + std::to_string(ep.port);
}

auto to_string(ConclusionReason reason) -> std::string_view {
  switch (reason) {
    case ConclusionReason::fin_rst:
      return "fin_rst";
    case ConclusionReason::timeout:
      return "timeout";
    case ConclusionReason::flush:
      return "flush";
  }
  return "unknown";
}

void DirectionStats::add(const PacketRecord& pkt) {
  if (packets == 0) {
    first = pkt.ts;
    last = pkt.ts;
  } else {
    first = std::min(first, pkt.ts);
    last = std::max(last, pkt.ts);
  }
  ++packets;
  bytes += pkt.ip_total_length;
  if (pkt.tcp_payload_length >= 1)
    ++payload_packets;
  if (pkt.flags.psh)
    ++push_packets;
  ip_sizes.push_back(pkt.ip_total_length);
}

auto FlowRecord::open(const PacketRecord& first) -> FlowRecord {
  auto flow = FlowRecord{};
  flow.key = FlowKey::of(first);
  flow.initiator = first.src;
  flow.responder = first.dst;
  flow.first_ts = first.ts;
  flow.last_ts = first.ts;
  flow.accumulate(first);
  return flow;
}

void FlowRecord::accumulate(const PacketRecord& pkt) {
  first_ts = std::min(first_ts, pkt.ts);
  last_ts = std::max(last_ts, pkt.ts);
  if (pkt.src == initiator && pkt.dst == responder)
    up.add(pkt);
  else
    down.add(pkt);
}

auto flow_less(const FlowRecord& a, const FlowRecord& b) -> bool {
  auto tie = [](const FlowRecord& f) {
    return std::tie(f.key, f.first_ts, f.initiator, f.last_ts, f.up.packets,
                    f.down.packets, f.reason, f.up.bytes, f.down.bytes);
  };
  if (tie(a) != tie(b))
    return tie(a) < tie(b);
  return std::tie(a.up.ip_sizes, a.down.ip_sizes)
         < std::tie(b.up.ip_sizes, b.down.ip_sizes);
}

} // namespace itcm
