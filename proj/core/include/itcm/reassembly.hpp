// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/flow.hpp"

#include <cstdint>
#include <list>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace itcm {

struct Opened {
  FlowKey key;
};

struct Concluded {
  FlowRecord flow;
};

struct Dropped {
  FlowKey key;
};

/// What a single packet did to the table. A packet causes at most one event;
/// plain accumulation into a live connection causes none.
using FlowEvent = std::variant<Opened, Concluded, Dropped>;

enum class TimeoutMode {
  /// now - last_ts > timeout
  idle,
  /// now - first_ts > timeout
  duration,
};

struct ReapPolicy {
  Duration timeout = std::chrono::seconds{60};
  TimeoutMode mode = TimeoutMode::idle;
};

enum class ConnState { not_established, established };

enum class ReassemblyPolicy { move_to_front, naive_scan };

auto to_string(ReassemblyPolicy policy) -> std::string_view;

struct ListLookupStats {
  std::uint64_t hits = 0;
  std::uint64_t hit_position_sum = 0;
  std::uint64_t comparisons = 0;

  /// Mean 1-based position of successful lookups, 0 without hits.
  auto mean_hit_position() const -> double {
    return hits == 0 ? 0.0
                     : static_cast<double>(hit_position_sum)
                         / static_cast<double>(hits);
  }
};

struct LookupStats {
  ListLookupStats established;
  ListLookupStats not_established;

  auto total_comparisons() const -> std::uint64_t {
    return established.comparisons + not_established.comparisons;
  }
};

/// Connection tracking for the TCP flow reassembly state machine.
///
/// Packets carrying SYN are matched against not-yet-established connections
/// and open a new one when unmatched. Other packets are matched against the
/// established connections first, then the not-established ones (promoting
/// the match), and dropped when neither holds the key. FIN or RST on a
/// non-SYN packet concludes its connection immediately.
class Reassembler {
public:
  virtual ~Reassembler() = default;

  virtual auto handle_packet(const PacketRecord& pkt)
    -> std::optional<FlowEvent> = 0;

  /// Removes and returns every connection whose timeout has expired at `now`.
  /// Order: established connections first, each group in table order.
  virtual auto reap(Timestamp now, const ReapPolicy& policy)
    -> std::vector<FlowRecord> = 0;

  /// Concludes everything still live; the table is empty afterwards.
  virtual auto flush() -> std::vector<FlowRecord> = 0;

  virtual auto live_connections() const -> std::size_t = 0;

  auto dropped() const -> std::uint64_t {
    return dropped_;
  }

protected:
  std::uint64_t dropped_ = 0;
};

/// Split established / not-established lists with recently-accessed-first
/// ordering: every successful lookup moves the record to the list head.
class ConnectionTable final : public Reassembler {
public:
  struct Connection {
    FlowRecord flow;
    ConnState state = ConnState::not_established;
  };

  auto handle_packet(const PacketRecord& pkt)
    -> std::optional<FlowEvent> override;
  auto reap(Timestamp now, const ReapPolicy& policy)
    -> std::vector<FlowRecord> override;
  auto flush() -> std::vector<FlowRecord> override;
  auto live_connections() const -> std::size_t override {
    return established_.size() + not_established_.size();
  }

  auto lookup_stats() const -> const LookupStats& {
    return stats_;
  }

  /// Keys in list order, front first.
  auto keys(ConnState list) const -> std::vector<FlowKey>;

private:
  using List = std::list<Connection>;

  auto find(List& list, ListLookupStats& stats, const FlowKey& key)
    -> List::iterator;
  auto conclude(List& list, List::iterator it, ConclusionReason reason)
    -> FlowRecord;

  List established_;
  List not_established_;
  LookupStats stats_;
};

/// Reference table: one unordered list scanned front to back, never
/// reordered. Produces the same flows as ConnectionTable at higher cost.
class ScanTable final : public Reassembler {
public:
  auto handle_packet(const PacketRecord& pkt)
    -> std::optional<FlowEvent> override;
  auto reap(Timestamp now, const ReapPolicy& policy)
    -> std::vector<FlowRecord> override;
  auto flush() -> std::vector<FlowRecord> override;
  auto live_connections() const -> std::size_t override {
    return connections_.size();
  }

private:
  struct Entry {
    FlowRecord flow;
    ConnState state;
  };

  auto index_of(const FlowKey& key, ConnState state) const
    -> std::optional<std::size_t>;
  auto take(std::size_t index, ConclusionReason reason) -> FlowRecord;

  std::vector<Entry> connections_;
};

auto make_reassembler(ReassemblyPolicy policy) -> std::unique_ptr<Reassembler>;

/// True when the reap policy expires `flow` at `now`.
auto expired(const FlowRecord& flow, Timestamp now, const ReapPolicy& policy)
  -> bool;

/// Interval index of `ts` relative to the trace start `origin`.
auto interval_of(Timestamp ts, Timestamp origin, Duration quantum)
  -> std::size_t;

/// Batch reassembly of an in-memory packet list with the monitor's reap
/// schedule: packets are processed in order, the table is reaped at every
/// quantum boundary (relative to the first packet) and flushed at the end.
/// Flows come out in delivery order.
auto reassemble_all(Reassembler& table, std::span<const PacketRecord> packets,
                    Duration quantum, const ReapPolicy& policy)
  -> std::vector<FlowRecord>;

} // namespace itcm
