// SPDX-License-Identifier: Apache-2.0

#include "itcm/pcap.hpp"

#include <fstream>
#include <ostream>

namespace itcm::pcap {

namespace {

constexpr std::uint32_t writer_snaplen = 65535;

void put16(std::vector<std::byte>& out, std::size_t at, std::uint16_t v) {
  out[at] = std::byte(v >> 8);
  out[at + 1] = std::byte(v & 0xff);
}

void put32(std::vector<std::byte>& out, std::size_t at, std::uint32_t v) {
  put16(out, at, static_cast<std::uint16_t>(v >> 16));
  put16(out, at + 2, static_cast<std::uint16_t>(v & 0xffff));
}

class FieldWriter {
public:
  FieldWriter(std::ostream& out, ByteOrder order) : out_{out}, order_{order} {
  }

  void u16(std::uint16_t v) {
    if (order_ == ByteOrder::little)
      bytes({static_cast<char>(v & 0xff), static_cast<char>(v >> 8)});
    else
      bytes({static_cast<char>(v >> 8), static_cast<char>(v & 0xff)});
  }

  void u32(std::uint32_t v) {
    if (order_ == ByteOrder::little) {
      u16(static_cast<std::uint16_t>(v & 0xffff));
      u16(static_cast<std::uint16_t>(v >> 16));
    } else {
      u16(static_cast<std::uint16_t>(v >> 16));
      u16(static_cast<std::uint16_t>(v & 0xffff));
    }
  }

private:
  void bytes(std::initializer_list<char> b) {
    out_.write(b.begin(), static_cast<std::streamsize>(b.size()));
  }

  std::ostream& out_;
  ByteOrder order_;
};

} // namespace

auto encode_frame(const PacketRecord& pkt, std::uint32_t link_type,
                  bool include_payload) -> std::vector<std::byte> {
  constexpr std::size_t ip_header = 20;
  constexpr std::size_t tcp_header = 20;
  auto link = link_type == linktype_ethernet ? std::size_t{14} : 0;
  auto header_bytes = link + ip_header + tcp_header;
  auto payload_in_ip = std::size_t{pkt.ip_total_length} - ip_header
                       - tcp_header;
  auto frame = std::vector<std::byte>(
    header_bytes + (include_payload ? payload_in_ip : 0), std::byte{0});
  if (link != 0) {
    // Locally administered MACs; the decoder ignores them.
    frame[0] = std::byte{0x02};
    frame[6] = std::byte{0x02};
    frame[11] = std::byte{0x01};
    put16(frame, 12, 0x0800);
  }
  auto ip = link;
  frame[ip] = std::byte{0x45};
  put16(frame, ip + 2, pkt.ip_total_length);
  put16(frame, ip + 6, 0x4000); // DF
  frame[ip + 8] = std::byte{64};
  frame[ip + 9] = std::byte{6};
  put32(frame, ip + 12, pkt.src.ip);
  put32(frame, ip + 16, pkt.dst.ip);
  auto tcp = ip + ip_header;
  put16(frame, tcp, pkt.src.port);
  put16(frame, tcp + 2, pkt.dst.port);
  put32(frame, tcp + 4, pkt.seq);
  frame[tcp + 12] = std::byte{0x50};
  auto flags = (pkt.flags.fin ? 0x01u : 0u) | (pkt.flags.syn ? 0x02u : 0u)
               | (pkt.flags.rst ? 0x04u : 0u) | (pkt.flags.psh ? 0x08u : 0u)
               | (pkt.flags.ack ? 0x10u : 0u);
  frame[tcp + 13] = std::byte(flags);
  put16(frame, tcp + 14, 65535);
  return frame;
}

void write_trace(std::ostream& out, std::span<const PacketRecord> packets,
                 const WriterOptions& options) {
  auto w = FieldWriter{out, options.byte_order};
  w.u32(options.resolution == Resolution::nano ? magic_nano : magic_micro);
  w.u16(2);
  w.u16(4);
  w.u32(0);
  w.u32(0);
  w.u32(writer_snaplen);
  w.u32(options.link_type);
  auto link = options.link_type == linktype_ethernet ? 14u : 0u;
  for (const auto& pkt : packets) {
    if (pkt.ip_total_length != 40u + pkt.tcp_payload_length)
      throw std::invalid_argument{
        "write_trace: ip_total_length must equal 40 + tcp_payload_length"};
    auto frame = encode_frame(pkt, options.link_type, options.include_payload);
    auto micros = pkt.ts.count();
    if (micros < 0)
      throw std::invalid_argument{"write_trace: negative timestamp"};
    w.u32(static_cast<std::uint32_t>(micros / 1'000'000));
    auto fraction = static_cast<std::uint32_t>(micros % 1'000'000);
    w.u32(options.resolution == Resolution::nano ? fraction * 1000 : fraction);
    w.u32(static_cast<std::uint32_t>(frame.size()));
    w.u32(link + pkt.ip_total_length);
    out.write(reinterpret_cast<const char*>(frame.data()),
              static_cast<std::streamsize>(frame.size()));
  }
  if (!out)
    throw TraceError{TraceError::Kind::io, 0, "write_trace: write failed"};
}

void write_trace(const std::filesystem::path& path,
                 std::span<const PacketRecord> packets,
                 const WriterOptions& options) {
  auto out = std::ofstream{path, std::ios::binary | std::ios::trunc};
  if (!out)
    throw TraceError{TraceError::Kind::io, 0,
                     path.string() + ": cannot create trace"};
  write_trace(out, packets, options);
}

} // namespace itcm::pcap
