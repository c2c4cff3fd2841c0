// SPDX-License-Identifier: Apache-2.0

#include "itcm/pcap.hpp"

#include <array>
#include <fstream>
#include <istream>

namespace itcm::pcap {

namespace {

// Anything larger is certainly a corrupt record header, not a real frame.
constexpr std::uint32_t max_record_length = 256u * 1024u * 1024u;

constexpr auto swap32(std::uint32_t v) -> std::uint32_t {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

auto read_exact(std::istream& in, std::byte* dst, std::size_t n)
  -> std::size_t {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

auto load_le32(const std::byte* p) -> std::uint32_t {
  return std::to_integer<std::uint32_t>(p[0])
         | (std::to_integer<std::uint32_t>(p[1]) << 8)
         | (std::to_integer<std::uint32_t>(p[2]) << 16)
         | (std::to_integer<std::uint32_t>(p[3]) << 24);
}

auto load_be32(const std::byte* p) -> std::uint32_t {
  return (std::to_integer<std::uint32_t>(p[0]) << 24)
         | (std::to_integer<std::uint32_t>(p[1]) << 16)
         | (std::to_integer<std::uint32_t>(p[2]) << 8)
         | std::to_integer<std::uint32_t>(p[3]);
}

} // namespace

TraceReader::TraceReader(std::unique_ptr<std::istream> in, std::string source)
  : in_{std::move(in)}, source_{std::move(source)} {
  if (!in_ || !*in_)
    throw TraceError{TraceError::Kind::io, 0, source_ + ": cannot read trace"};
  auto header = std::array<std::byte, file_header_size>{};
  auto got = read_exact(*in_, header.data(), header.size());
  if (got < header.size())
    throw TraceError{TraceError::Kind::truncated, got,
                     source_ + ": truncated pcap global header ("
                       + std::to_string(got) + " of 24 bytes)"};
  auto magic = load_le32(header.data());
  switch (magic) {
    case magic_micro:
      order_ = ByteOrder::little;
      resolution_ = Resolution::micro;
      break;
    case magic_nano:
      order_ = ByteOrder::little;
      resolution_ = Resolution::nano;
      break;
    case swap32(magic_micro):
      order_ = ByteOrder::big;
      resolution_ = Resolution::micro;
      break;
    case swap32(magic_nano):
      order_ = ByteOrder::big;
      resolution_ = Resolution::nano;
      break;
    default:
      throw TraceError{TraceError::Kind::format, 0,
                       source_ + ": unrecognized pcap magic number"};
  }
  snaplen_ = read_u32(header.data() + 16);
  link_type_ = read_u32(header.data() + 20);
  offset_ = file_header_size;
}

TraceReader::TraceReader(TraceReader&&) noexcept = default;
auto TraceReader::operator=(TraceReader&&) noexcept -> TraceReader& = default;
TraceReader::~TraceReader() = default;

auto TraceReader::read_u32(const std::byte* p) const -> std::uint32_t {
  return order_ == ByteOrder::little ? load_le32(p) : load_be32(p);
}

auto TraceReader::next() -> std::optional<RawPacket> {
  auto header = std::array<std::byte, record_header_size>{};
  auto got = read_exact(*in_, header.data(), header.size());
  if (got == 0)
    return std::nullopt;
  if (got < header.size())
    throw TraceError{TraceError::Kind::truncated, offset_,
                     source_ + ": truncated record header at byte offset "
                       + std::to_string(offset_)};
  auto seconds = read_u32(header.data());
  auto fraction = read_u32(header.data() + 4);
  auto caplen = read_u32(header.data() + 8);
  auto origlen = read_u32(header.data() + 12);
  if (caplen > max_record_length)
    throw TraceError{TraceError::Kind::format, offset_,
                     source_ + ": implausible record length "
                       + std::to_string(caplen) + " at byte offset "
                       + std::to_string(offset_)};
  auto packet = RawPacket{};
  auto micros = resolution_ == Resolution::nano ? fraction / 1000 : fraction;
  packet.ts = Timestamp{static_cast<std::int64_t>(seconds) * 1'000'000
                        + static_cast<std::int64_t>(micros)};
  packet.original_length = origlen;
  packet.data.resize(caplen);
  got = read_exact(*in_, packet.data.data(), caplen);
  if (got < caplen)
    throw TraceError{TraceError::Kind::truncated, offset_,
                     source_ + ": record at byte offset "
                       + std::to_string(offset_) + " claims "
                       + std::to_string(caplen) + " bytes but only "
                       + std::to_string(got) + " remain"};
  offset_ += record_header_size + caplen;
  return packet;
}

auto open_trace(const std::filesystem::path& path) -> TraceReader {
  auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*in)
    throw TraceError{TraceError::Kind::io, 0,
                     path.string() + ": cannot open trace"};
  return TraceReader{std::move(in), path.string()};
}

void DecodeCounters::count(SkipReason reason) {
  switch (reason) {
    case SkipReason::link_type:
      ++link_type;
      break;
    case SkipReason::not_ipv4:
      ++not_ipv4;
      break;
    case SkipReason::ipv6:
      ++ipv6;
      break;
    case SkipReason::fragment:
      ++fragment;
      break;
    case SkipReason::not_tcp:
      ++not_tcp;
      break;
    case SkipReason::malformed:
      ++malformed;
      break;
  }
}

auto DecodeCounters::skipped() const -> std::uint64_t {
  return link_type + not_ipv4 + ipv6 + fragment + not_tcp + malformed;
}

auto next_tcp_packet(TraceReader& reader, DecodeCounters& counters)
  -> std::optional<PacketRecord> {
  while (auto raw = reader.next()) {
    ++counters.records;
    auto reason = SkipReason::malformed;
    try {
      if (auto pkt = decode_packet(raw->ts, raw->data, reader.link_type(),
                                   &reason)) {
        ++counters.decoded;
        return pkt;
      }
    } catch (const DecodeError&) {
      reason = SkipReason::malformed;
    }
    counters.count(reason);
  }
  return std::nullopt;
}

auto read_all_packets(TraceReader& reader, DecodeCounters& counters)
  -> std::vector<PacketRecord> {
  auto out = std::vector<PacketRecord>{};
  while (auto pkt = next_tcp_packet(reader, counters))
    out.push_back(*pkt);
  return out;
}

} // namespace itcm::pcap
