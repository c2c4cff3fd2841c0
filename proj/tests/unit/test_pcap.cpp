// SPDX-License-Identifier: Apache-2.0

#include "itcm/pcap.hpp"
#include "itcm/synth.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace itcm {
namespace {

using pcap::TraceError;
using testing::reader_for;
using testing::reader_for_bytes;

auto bytes(std::initializer_list<int> values) -> std::string {
  auto s = std::string{};
  for (auto v : values)
    s.push_back(static_cast<char>(v));
  return s;
}

auto le32(std::uint32_t v) -> std::string {
  return bytes({static_cast<int>(v & 0xff), static_cast<int>((v >> 8) & 0xff),
                static_cast<int>((v >> 16) & 0xff),
                static_cast<int>(v >> 24)});
}

auto le16(std::uint16_t v) -> std::string {
  return bytes({v & 0xff, v >> 8});
}

/// Little-endian global header with the given magic value.
auto le_header(std::uint32_t magic, std::uint32_t link = 1) -> std::string {
  return le32(magic) + le16(2) + le16(4) + le32(0) + le32(0) + le32(65535)
         + le32(link);
}

auto le_record(std::uint32_t sec, std::uint32_t frac, const std::string& data)
  -> std::string {
  return le32(sec) + le32(frac) + le32(static_cast<std::uint32_t>(data.size()))
         + le32(static_cast<std::uint32_t>(data.size())) + data;
}

auto ethernet(int type_hi, int type_lo) -> std::string {
  return std::string(12, '\x02') + bytes({type_hi, type_lo});
}

/// IPv4 header (no options) carrying `protocol`, total length `total`.
auto ipv4(int protocol, std::uint16_t total, int frag_hi = 0x40,
          int frag_lo = 0) -> std::string {
  return bytes({0x45, 0, total >> 8, total & 0xff, 0, 1, frag_hi, frag_lo, 64,
                protocol, 0, 0, 192, 168, 0, 1, 192, 168, 0, 2});
}

/// TCP header 1234 -> 80, seq 100, given flag byte.
auto tcp(int flags) -> std::string {
  return bytes({0x04, 0xd2, 0x00, 0x50, 0, 0, 0, 100, 0, 0, 0, 0, 0x50, flags,
                0xff, 0xff, 0, 0, 0, 0});
}

auto span_of(const std::string& s) -> std::span<const std::byte> {
  return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

TEST(PcapOpen, LittleEndianMicrosecondMagic) {
  auto r = reader_for_bytes(bytes({0xd4, 0xc3, 0xb2, 0xa1}) + le16(2) + le16(4)
                            + le32(0) + le32(0) + le32(65535) + le32(1));
  EXPECT_EQ(r.byte_order(), pcap::ByteOrder::little);
  EXPECT_EQ(r.resolution(), pcap::Resolution::micro);
  EXPECT_EQ(r.link_type(), 1u);
  EXPECT_FALSE(r.next().has_value());
}

TEST(PcapOpen, BigEndianMicrosecondMagic) {
  auto h = bytes({0xa1, 0xb2, 0xc3, 0xd4, 0, 2, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0,
                  0, 0, 0xff, 0xff, 0, 0, 0, 1});
  auto r = reader_for_bytes(h);
  EXPECT_EQ(r.byte_order(), pcap::ByteOrder::big);
  EXPECT_EQ(r.resolution(), pcap::Resolution::micro);
  EXPECT_EQ(r.link_type(), 1u);
}

TEST(PcapOpen, AllFourMagicsDetected) {
  for (auto order : {pcap::ByteOrder::little, pcap::ByteOrder::big})
    for (auto res : {pcap::Resolution::micro, pcap::Resolution::nano}) {
      auto out = std::ostringstream{};
      pcap::write_trace(out, {}, {.byte_order = order, .resolution = res});
      auto r = reader_for_bytes(out.str());
      EXPECT_EQ(r.byte_order(), order);
      EXPECT_EQ(r.resolution(), res);
    }
}

TEST(PcapOpen, ShortFileIsTruncation) {
  try {
    reader_for_bytes(std::string(16, '\0'));
    FAIL() << "expected TraceError";
  } catch (const TraceError& e) {
    EXPECT_EQ(e.kind(), TraceError::Kind::truncated);
  }
}

TEST(PcapOpen, UnknownMagicIsFormatError) {
  try {
    reader_for_bytes(le_header(0x12345678));
    FAIL() << "expected TraceError";
  } catch (const TraceError& e) {
    EXPECT_EQ(e.kind(), TraceError::Kind::format);
  }
}

TEST(PcapOpen, MissingFileIsIoError) {
  try {
    pcap::open_trace("/nonexistent/trace.pcap");
    FAIL() << "expected TraceError";
  } catch (const TraceError& e) {
    EXPECT_EQ(e.kind(), TraceError::Kind::io);
  }
}

TEST(PcapNext, ReturnsCapturedBytes) {
  auto data = std::string(60, '\x07');
  auto r = reader_for_bytes(le_header(pcap::magic_micro)
                            + le_record(10, 500, data));
  auto p = r.next();
  ASSERT_TRUE(p);
  EXPECT_EQ(p->data.size(), 60u);
  EXPECT_EQ(p->ts, Timestamp{10'000'500});
  EXPECT_FALSE(r.next());
}

TEST(PcapNext, NanosecondsTruncateToMicroseconds) {
  auto r = reader_for_bytes(le_header(pcap::magic_nano)
                            + le_record(3, 1999, "x"));
  auto p = r.next();
  ASSERT_TRUE(p);
  EXPECT_EQ(p->ts, Timestamp{3'000'001});
}

TEST(PcapNext, CaplenBeyondEndIsTruncationWithOffset) {
  auto rec = le32(1) + le32(0) + le32(100) + le32(100) + std::string(10, 'a');
  auto r = reader_for_bytes(le_header(pcap::magic_micro) + rec);
  try {
    r.next();
    FAIL() << "expected TraceError";
  } catch (const TraceError& e) {
    EXPECT_EQ(e.kind(), TraceError::Kind::truncated);
    EXPECT_EQ(e.offset(), pcap::file_header_size);
  }
}

TEST(PcapNext, PartialRecordHeaderIsTruncation) {
  auto r = reader_for_bytes(le_header(pcap::magic_micro) + le32(1));
  EXPECT_THROW(r.next(), TraceError);
}

TEST(Decode, HandBuiltSyn) {
  auto frame = ethernet(0x08, 0x00) + ipv4(6, 40) + tcp(0x02);
  ASSERT_EQ(frame.size(), 54u);
  auto p = pcap::decode_packet(Timestamp{5}, span_of(frame), 1);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->ts, Timestamp{5});
  EXPECT_EQ(p->src, (Endpoint{0xc0a80001u, 1234}));
  EXPECT_EQ(p->dst, (Endpoint{0xc0a80002u, 80}));
  EXPECT_EQ(p->ip_total_length, 40);
  EXPECT_EQ(p->tcp_payload_length, 0);
  EXPECT_EQ(p->seq, 100u);
  EXPECT_EQ(p->flags, (TcpFlags{.syn = true}));
}

TEST(Decode, AllFlagBits) {
  auto frame = ethernet(0x08, 0x00) + ipv4(6, 40) + tcp(0x1f);
  auto p = pcap::decode_packet(Timestamp{0}, span_of(frame), 1);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->flags, (TcpFlags{true, true, true, true, true}));
}

TEST(Decode, HeaderOptionsAndPayloadLength) {
  // IHL 6 and data offset 6, 10 payload bytes.
  auto ip = ipv4(6, 24 + 24 + 10);
  ip[0] = static_cast<char>(0x46);
  ip += std::string(4, '\0');
  auto t = tcp(0x18);
  t[12] = static_cast<char>(0x60);
  t += std::string(4, '\0');
  auto frame = ethernet(0x08, 0x00) + ip + t + std::string(10, 'p');
  auto p = pcap::decode_packet(Timestamp{0}, span_of(frame), 1);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->tcp_payload_length, 10);
  EXPECT_EQ(p->tcp_payload_length + 4 * 6 + 4 * 6, p->ip_total_length);
}

TEST(Decode, SkipsNonTcpTraffic) {
  auto reason = pcap::SkipReason{};
  auto arp = ethernet(0x08, 0x06) + std::string(28, '\0');
  EXPECT_FALSE(pcap::decode_packet(Timestamp{0}, span_of(arp), 1, &reason));
  EXPECT_EQ(reason, pcap::SkipReason::not_ipv4);

  auto udp = ethernet(0x08, 0x00) + ipv4(17, 28) + std::string(8, '\0');
  EXPECT_FALSE(pcap::decode_packet(Timestamp{0}, span_of(udp), 1, &reason));
  EXPECT_EQ(reason, pcap::SkipReason::not_tcp);

  auto v6 = ethernet(0x86, 0xdd) + std::string(40, '\0');
  EXPECT_FALSE(pcap::decode_packet(Timestamp{0}, span_of(v6), 1, &reason));
  EXPECT_EQ(reason, pcap::SkipReason::ipv6);

  auto frag = ethernet(0x08, 0x00) + ipv4(6, 40, 0x20, 0x10) + tcp(0x10);
  EXPECT_FALSE(pcap::decode_packet(Timestamp{0}, span_of(frag), 1, &reason));
  EXPECT_EQ(reason, pcap::SkipReason::fragment);

  auto any = ipv4(6, 40) + tcp(0x02);
  EXPECT_FALSE(pcap::decode_packet(Timestamp{0}, span_of(any), 113, &reason));
  EXPECT_EQ(reason, pcap::SkipReason::link_type);
}

TEST(Decode, FirstFragmentDecodes) {
  // More-fragments set, offset 0.
  auto frame = ethernet(0x08, 0x00) + ipv4(6, 40, 0x20, 0x00) + tcp(0x10);
  EXPECT_TRUE(pcap::decode_packet(Timestamp{0}, span_of(frame), 1));
}

TEST(Decode, RawIpv4LinkType) {
  auto frame = ipv4(6, 40) + tcp(0x02);
  auto p = pcap::decode_packet(Timestamp{0}, span_of(frame),
                               pcap::linktype_raw);
  ASSERT_TRUE(p);
  EXPECT_TRUE(p->flags.syn);
}

TEST(Decode, TruncatedTcpHeaderThrows) {
  auto frame = ethernet(0x08, 0x00) + ipv4(6, 40) + tcp(0x02).substr(0, 10);
  EXPECT_THROW(pcap::decode_packet(Timestamp{0}, span_of(frame), 1),
               pcap::DecodeError);
  auto short_total = ethernet(0x08, 0x00) + ipv4(6, 30) + tcp(0x02);
  EXPECT_THROW(pcap::decode_packet(Timestamp{0}, span_of(short_total), 1),
               pcap::DecodeError);
}

TEST(Decode, IsDeterministic) {
  auto frame = ethernet(0x08, 0x00) + ipv4(6, 40) + tcp(0x12);
  EXPECT_EQ(pcap::decode_packet(Timestamp{9}, span_of(frame), 1),
            pcap::decode_packet(Timestamp{9}, span_of(frame), 1));
}

TEST(NextTcpPacket, CountsSkippedRecords) {
  auto good = ethernet(0x08, 0x00) + ipv4(6, 40) + tcp(0x02);
  auto arp = ethernet(0x08, 0x06) + std::string(28, '\0');
  auto udp = ethernet(0x08, 0x00) + ipv4(17, 28) + std::string(8, '\0');
  auto bad = ethernet(0x08, 0x00) + ipv4(6, 40) + tcp(0x02).substr(0, 8);
  auto r = reader_for_bytes(le_header(pcap::magic_micro) + le_record(1, 0, arp)
                            + le_record(1, 1, good) + le_record(1, 2, udp)
                            + le_record(1, 3, bad) + le_record(1, 4, good));
  auto counters = pcap::DecodeCounters{};
  auto packets = pcap::read_all_packets(r, counters);
  EXPECT_EQ(packets.size(), 2u);
  EXPECT_EQ(counters.records, 5u);
  EXPECT_EQ(counters.decoded, 2u);
  EXPECT_EQ(counters.not_ipv4, 1u);
  EXPECT_EQ(counters.not_tcp, 1u);
  EXPECT_EQ(counters.malformed, 1u);
  EXPECT_EQ(counters.skipped(), 3u);
}

TEST(TraceRoundTrip, EveryWriterVariantReproducesPackets) {
  auto config = SynthConfig{};
  config.sessions = 60;
  config.seed = 11;
  auto packets = generate_trace(config);
  ASSERT_FALSE(packets.empty());
  for (auto order : {pcap::ByteOrder::little, pcap::ByteOrder::big})
    for (auto res : {pcap::Resolution::micro, pcap::Resolution::nano})
      for (auto link : {pcap::linktype_ethernet, pcap::linktype_raw})
        for (auto payload : {false, true}) {
          auto r = reader_for(packets, {order, res, link, payload});
          auto counters = pcap::DecodeCounters{};
          EXPECT_EQ(pcap::read_all_packets(r, counters), packets);
          EXPECT_EQ(counters.skipped(), 0u);
        }
}

TEST(TraceRoundTrip, FileOnDisk) {
  auto dir = testing::TempDir{};
  auto packets = generate_trace(SynthConfig::clean(10, 4));
  pcap::write_trace(std::filesystem::path{dir.file("t.pcap")}, packets);
  auto r = pcap::open_trace(dir.file("t.pcap"));
  auto counters = pcap::DecodeCounters{};
  EXPECT_EQ(pcap::read_all_packets(r, counters), packets);
}

TEST(TraceWriter, RejectsInconsistentLengths) {
  auto p = testing::make_packet(0, {1, 1}, {2, 2}, {.syn = true}, 0);
  p.ip_total_length = 41;
  auto out = std::ostringstream{};
  EXPECT_THROW(pcap::write_trace(out, std::vector{p}), std::invalid_argument);
}

} // namespace
} // namespace itcm
