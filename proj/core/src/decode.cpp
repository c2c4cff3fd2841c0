// SPDX-License-Identifier: Apache-2.0

#include "itcm/pcap.hpp"

namespace itcm::pcap {

namespace {

constexpr std::size_t ethernet_header_size = 14;
constexpr std::uint16_t ethertype_ipv4 = 0x0800;
constexpr std::uint16_t ethertype_ipv6 = 0x86dd;
constexpr std::uint8_t ip_protocol_tcp = 6;

auto be16(std::span<const std::byte> b, std::size_t at) -> std::uint16_t {
  return static_cast<std::uint16_t>((std::to_integer<unsigned>(b[at]) << 8)
                                    | std::to_integer<unsigned>(b[at + 1]));
}

auto be32(std::span<const std::byte> b, std::size_t at) -> std::uint32_t {
  return (std::uint32_t{be16(b, at)} << 16) | be16(b, at + 2);
}

auto skip(SkipReason reason, SkipReason* out) -> std::optional<PacketRecord> {
  if (out)
    *out = reason;
  return std::nullopt;
}

} // namespace

auto decode_packet(Timestamp ts, std::span<const std::byte> frame,
                   std::uint32_t link_type, SkipReason* skipped)
  -> std::optional<PacketRecord> {
  auto ip = std::span<const std::byte>{};
  if (link_type == linktype_ethernet) {
    if (frame.size() < ethernet_header_size)
      throw DecodeError{"frame shorter than an Ethernet header"};
    auto ethertype = be16(frame, 12);
    if (ethertype == ethertype_ipv6)
      return skip(SkipReason::ipv6, skipped);
    if (ethertype != ethertype_ipv4)
      return skip(SkipReason::not_ipv4, skipped);
    ip = frame.subspan(ethernet_header_size);
  } else if (link_type == linktype_raw) {
    if (frame.empty())
      throw DecodeError{"empty raw IP frame"};
    auto version = std::to_integer<unsigned>(frame[0]) >> 4;
    if (version == 6)
      return skip(SkipReason::ipv6, skipped);
    if (version != 4)
      return skip(SkipReason::not_ipv4, skipped);
    ip = frame;
  } else {
    return skip(SkipReason::link_type, skipped);
  }

  if (ip.size() < 20)
    throw DecodeError{"IPv4 header truncated"};
  auto version = std::to_integer<unsigned>(ip[0]) >> 4;
  if (version != 4)
    return skip(SkipReason::not_ipv4, skipped);
  auto ihl_bytes = std::size_t{std::to_integer<unsigned>(ip[0]) & 0x0fu} * 4;
  if (ihl_bytes < 20)
    throw DecodeError{"IPv4 header length below 20 bytes"};
  auto fragment_offset = be16(ip, 6) & 0x1fffu;
  if (fragment_offset != 0)
    return skip(SkipReason::fragment, skipped);
  if (std::to_integer<std::uint8_t>(ip[9]) != ip_protocol_tcp)
    return skip(SkipReason::not_tcp, skipped);
  if (ip.size() < ihl_bytes + 20)
    throw DecodeError{"TCP header truncated"};

  auto total_length = be16(ip, 2);
  auto tcp = ip.subspan(ihl_bytes);
  auto data_offset_bytes = std::size_t{std::to_integer<unsigned>(tcp[12]) >> 4}
                           * 4;
  if (data_offset_bytes < 20)
    throw DecodeError{"TCP data offset below 20 bytes"};
  if (tcp.size() < data_offset_bytes)
    throw DecodeError{"TCP options truncated"};
  if (total_length < ihl_bytes + data_offset_bytes)
    throw DecodeError{"IPv4 total length smaller than its headers"};

  auto pkt = PacketRecord{};
  pkt.ts = ts;
  pkt.src = Endpoint{be32(ip, 12), be16(tcp, 0)};
  pkt.dst = Endpoint{be32(ip, 16), be16(tcp, 2)};
  pkt.ip_total_length = total_length;
  pkt.tcp_payload_length = static_cast<std::uint16_t>(
    total_length - ihl_bytes - data_offset_bytes);
  pkt.seq = be32(tcp, 4);
  auto flags = std::to_integer<unsigned>(tcp[13]);
  pkt.flags.fin = (flags & 0x01u) != 0;
  pkt.flags.syn = (flags & 0x02u) != 0;
  pkt.flags.rst = (flags & 0x04u) != 0;
  pkt.flags.psh = (flags & 0x08u) != 0;
  pkt.flags.ack = (flags & 0x10u) != 0;
  return pkt;
}

} // namespace itcm::pcap
