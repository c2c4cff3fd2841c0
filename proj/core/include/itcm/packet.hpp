// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>

namespace itcm {

/// Capture time as microseconds since the Unix epoch.
using Timestamp = std::chrono::microseconds;
using Duration = std::chrono::microseconds;

inline constexpr auto to_seconds(Duration d) -> double {
  return static_cast<double>(d.count()) / 1e6;
}

/// One side of a TCP conversation. The address is kept in host byte order.
struct Endpoint {
  std::uint32_t ip = 0;
  std::uint16_t port = 0;

  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

auto to_string(const Endpoint& ep) -> std::string;
auto format_ipv4(std::uint32_t ip) -> std::string;

struct TcpFlags {
  bool syn = false;
  bool ack = false;
  bool fin = false;
  bool rst = false;
  bool psh = false;

  friend auto operator==(const TcpFlags&, const TcpFlags&) -> bool = default;
};

/// Header facts of one decoded TCP segment. Payload bytes are never kept.
struct PacketRecord {
  Timestamp ts{0};
  Endpoint src;
  Endpoint dst;
  std::uint16_t ip_total_length = 0;
  std::uint16_t tcp_payload_length = 0;
  std::uint32_t seq = 0;
  TcpFlags flags;

  friend auto operator==(const PacketRecord&, const PacketRecord&) -> bool
    = default;
};

} // namespace itcm
