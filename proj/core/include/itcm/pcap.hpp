// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/packet.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace itcm::pcap {

inline constexpr std::uint32_t magic_micro = 0xa1b2c3d4;
inline constexpr std::uint32_t magic_nano = 0xa1b23c4d;
inline constexpr std::size_t file_header_size = 24;
inline constexpr std::size_t record_header_size = 16;

inline constexpr std::uint32_t linktype_ethernet = 1;
inline constexpr std::uint32_t linktype_raw = 101;

enum class ByteOrder { little, big };
enum class Resolution { micro, nano };

class TraceError : public std::runtime_error {
public:
  enum class Kind { io, format, truncated };

  TraceError(Kind kind, std::uint64_t offset, const std::string& what)
    : std::runtime_error{what}, kind_{kind}, offset_{offset} {
  }

  auto kind() const -> Kind {
    return kind_;
  }

  /// Byte offset in the trace at which the problem was detected.
  auto offset() const -> std::uint64_t {
    return offset_;
  }

private:
  Kind kind_;
  std::uint64_t offset_;
};

struct RawPacket {
  Timestamp ts{0};
  std::uint32_t original_length = 0;
  std::vector<std::byte> data;
};

/// Sequential cursor over a classic pcap file. Never reorders records.
class TraceReader {
public:
  /// Reads and validates the global header from `in`. `source` names the
  /// stream in diagnostics.
  TraceReader(std::unique_ptr<std::istream> in, std::string source);

  TraceReader(TraceReader&&) noexcept;
  auto operator=(TraceReader&&) noexcept -> TraceReader&;
  ~TraceReader();

  /// Next record, or nothing at a clean end of file.
  auto next() -> std::optional<RawPacket>;

  auto source() const -> const std::string& {
    return source_;
  }
  auto byte_order() const -> ByteOrder {
    return order_;
  }
  auto resolution() const -> Resolution {
    return resolution_;
  }
  auto link_type() const -> std::uint32_t {
    return link_type_;
  }
  auto snaplen() const -> std::uint32_t {
    return snaplen_;
  }
  auto offset() const -> std::uint64_t {
    return offset_;
  }

private:
  auto read_u32(const std::byte* p) const -> std::uint32_t;

  std::unique_ptr<std::istream> in_;
  std::string source_;
  ByteOrder order_ = ByteOrder::little;
  Resolution resolution_ = Resolution::micro;
  std::uint32_t link_type_ = 0;
  std::uint32_t snaplen_ = 0;
  std::uint64_t offset_ = 0;
};

/// Opens `path` as a pcap trace. Throws TraceError on I/O or format problems.
auto open_trace(const std::filesystem::path& path) -> TraceReader;

/// Why a record did not yield a PacketRecord.
enum class SkipReason {
  link_type,
  not_ipv4,
  ipv6,
  fragment,
  not_tcp,
  malformed,
};

struct DecodeCounters {
  std::uint64_t records = 0;
  std::uint64_t decoded = 0;
  std::uint64_t link_type = 0;
  std::uint64_t not_ipv4 = 0;
  std::uint64_t ipv6 = 0;
  std::uint64_t fragment = 0;
  std::uint64_t not_tcp = 0;
  std::uint64_t malformed = 0;

  void count(SkipReason reason);
  auto skipped() const -> std::uint64_t;

  friend auto operator==(const DecodeCounters&, const DecodeCounters&) -> bool
    = default;
};

class DecodeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Decodes an Ethernet (or raw IPv4) frame down to the TCP header. Returns
/// nothing for traffic the monitor ignores; `skipped` receives the reason when
/// non-null. Throws DecodeError when the frame claims IPv4/TCP but its headers
/// do not fit the captured bytes.
auto decode_packet(Timestamp ts, std::span<const std::byte> frame,
                   std::uint32_t link_type, SkipReason* skipped = nullptr)
  -> std::optional<PacketRecord>;

/// Pulls the next decodable TCP packet from `reader`, counting everything
/// that is skipped. Malformed frames are counted, not thrown.
auto next_tcp_packet(TraceReader& reader, DecodeCounters& counters)
  -> std::optional<PacketRecord>;

/// Reads every TCP packet of a trace into memory.
auto read_all_packets(TraceReader& reader, DecodeCounters& counters)
  -> std::vector<PacketRecord>;

struct WriterOptions {
  ByteOrder byte_order = ByteOrder::little;
  Resolution resolution = Resolution::micro;
  std::uint32_t link_type = linktype_ethernet;
  /// Write zero-filled payload bytes instead of truncating records to the
  /// headers (the original length is recorded either way).
  bool include_payload = false;
};

/// Encodes PacketRecords as Ethernet/IPv4/TCP (or raw IPv4) frames in a pcap
/// stream. Decoding the output reproduces the input records exactly.
void write_trace(std::ostream& out, std::span<const PacketRecord> packets,
                 const WriterOptions& options = {});
void write_trace(const std::filesystem::path& path,
                 std::span<const PacketRecord> packets,
                 const WriterOptions& options = {});

/// Serialized frame for one record, starting at the link layer.
auto encode_frame(const PacketRecord& pkt, std::uint32_t link_type,
                  bool include_payload) -> std::vector<std::byte>;

} // namespace itcm::pcap
