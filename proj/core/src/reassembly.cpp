// SPDX-License-Identifier: Apache-2.0

#include "itcm/reassembly.hpp"

#include <algorithm>

namespace itcm {

auto to_string(ReassemblyPolicy policy) -> std::string_view {
  return policy == ReassemblyPolicy::move_to_front ? "move_to_front"
                                                   : "naive_scan";
}

auto expired(const FlowRecord& flow, Timestamp now, const ReapPolicy& policy)
  -> bool {
  auto since = policy.mode == TimeoutMode::idle ? flow.last_ts : flow.first_ts;
  return now - since > policy.timeout;
}

auto interval_of(Timestamp ts, Timestamp origin, Duration quantum)
  -> std::size_t {
  if (ts <= origin)
    return 0;
  return static_cast<std::size_t>((ts - origin) / quantum);
}

// -- ConnectionTable ---------------------------------------------------------

auto ConnectionTable::find(List& list, ListLookupStats& stats,
                           const FlowKey& key) -> List::iterator {
  auto position = std::uint64_t{0};
  for (auto it = list.begin(); it != list.end(); ++it) {
    ++position;
    ++stats.comparisons;
    if (it->flow.key == key) {
      ++stats.hits;
      stats.hit_position_sum += position;
      if (it != list.begin())
        list.splice(list.begin(), list, it);
      return list.begin();
    }
  }
  return list.end();
}

auto ConnectionTable::conclude(List& list, List::iterator it,
                               ConclusionReason reason) -> FlowRecord {
  auto flow = std::move(it->flow);
  flow.reason = reason;
  list.erase(it);
  return flow;
}

auto ConnectionTable::handle_packet(const PacketRecord& pkt)
  -> std::optional<FlowEvent> {
  auto key = FlowKey::of(pkt);
  if (pkt.flags.syn) {
    if (auto it = find(not_established_, stats_.not_established, key);
        it != not_established_.end()) {
      it->flow.accumulate(pkt);
      return std::nullopt;
    }
    // A SYN for an already established key (e.g. a retransmitted SYN/ACK)
    // joins that connection so a key never lives in both lists.
    if (auto it = find(established_, stats_.established, key);
        it != established_.end()) {
      it->flow.accumulate(pkt);
      return std::nullopt;
    }
    not_established_.push_front(Connection{FlowRecord::open(pkt),
                                           ConnState::not_established});
    return Opened{key};
  }
  auto it = find(established_, stats_.established, key);
  if (it == established_.end()) {
    auto pending = find(not_established_, stats_.not_established, key);
    if (pending == not_established_.end()) {
      ++dropped_;
      return Dropped{key};
    }
    established_.splice(established_.begin(), not_established_, pending);
    it = established_.begin();
    it->state = ConnState::established;
  }
  it->flow.accumulate(pkt);
  if (pkt.flags.fin || pkt.flags.rst)
    return Concluded{conclude(established_, it, ConclusionReason::fin_rst)};
  return std::nullopt;
}

auto ConnectionTable::reap(Timestamp now, const ReapPolicy& policy)
  -> std::vector<FlowRecord> {
  auto out = std::vector<FlowRecord>{};
  for (auto* list : {&established_, &not_established_}) {
    for (auto it = list->begin(); it != list->end();) {
      if (expired(it->flow, now, policy)) {
        auto next = std::next(it);
        out.push_back(conclude(*list, it, ConclusionReason::timeout));
        it = next;
      } else {
        ++it;
      }
    }
  }
  return out;
}

auto ConnectionTable::flush() -> std::vector<FlowRecord> {
  auto out = std::vector<FlowRecord>{};
  out.reserve(live_connections());
  for (auto* list : {&established_, &not_established_}) {
    while (!list->empty())
      out.push_back(conclude(*list, list->begin(), ConclusionReason::flush));
  }
  return out;
}

auto ConnectionTable::keys(ConnState which) const -> std::vector<FlowKey> {
  const auto& list = which == ConnState::established ? established_
                                                     : not_established_;
  auto out = std::vector<FlowKey>{};
  out.reserve(list.size());
  for (const auto& c : list)
    out.push_back(c.flow.key);
  return out;
}

// -- ScanTable ---------------------------------------------------------------

auto ScanTable::index_of(const FlowKey& key, ConnState state) const
  -> std::optional<std::size_t> {
  for (std::size_t i = 0; i < connections_.size(); ++i)
    if (connections_[i].state == state && connections_[i].flow.key == key)
      return i;
  return std::nullopt;
}

auto ScanTable::take(std::size_t index, ConclusionReason reason)
  -> FlowRecord {
  auto flow = std::move(connections_[index].flow);
  flow.reason = reason;
  connections_.erase(connections_.begin()
                     + static_cast<std::ptrdiff_t>(index));
  return flow;
}

auto ScanTable::handle_packet(const PacketRecord& pkt)
  -> std::optional<FlowEvent> {
  auto key = FlowKey::of(pkt);
  if (pkt.flags.syn) {
    auto i = index_of(key, ConnState::not_established);
    if (!i)
      i = index_of(key, ConnState::established);
    if (i) {
      connections_[*i].flow.accumulate(pkt);
      return std::nullopt;
    }
    connections_.push_back(
      Entry{FlowRecord::open(pkt), ConnState::not_established});
    return Opened{key};
  }
  auto i = index_of(key, ConnState::established);
  if (!i) {
    i = index_of(key, ConnState::not_established);
    if (!i) {
      ++dropped_;
      return Dropped{key};
    }
    connections_[*i].state = ConnState::established;
  }
  connections_[*i].flow.accumulate(pkt);
  if (pkt.flags.fin || pkt.flags.rst)
    return Concluded{take(*i, ConclusionReason::fin_rst)};
  return std::nullopt;
}

auto ScanTable::reap(Timestamp now, const ReapPolicy& policy)
  -> std::vector<FlowRecord> {
  auto out = std::vector<FlowRecord>{};
  auto kept = std::vector<Entry>{};
  for (auto& e : connections_) {
    if (expired(e.flow, now, policy)) {
      e.flow.reason = ConclusionReason::timeout;
      out.push_back(std::move(e.flow));
    } else {
      kept.push_back(std::move(e));
    }
  }
  connections_ = std::move(kept);
  return out;
}

auto ScanTable::flush() -> std::vector<FlowRecord> {
  auto out = std::vector<FlowRecord>{};
  out.reserve(connections_.size());
  for (auto& e : connections_) {
    e.flow.reason = ConclusionReason::flush;
    out.push_back(std::move(e.flow));
  }
  connections_.clear();
  return out;
}

auto make_reassembler(ReassemblyPolicy policy)
  -> std::unique_ptr<Reassembler> {
  if (policy == ReassemblyPolicy::naive_scan)
    return std::make_unique<ScanTable>();
  return std::make_unique<ConnectionTable>();
}

auto reassemble_all(Reassembler& table, std::span<const PacketRecord> packets,
                    Duration quantum, const ReapPolicy& policy)
  -> std::vector<FlowRecord> {
  auto flows = std::vector<FlowRecord>{};
  if (packets.empty())
    return flows;
  auto origin = packets.front().ts;
  auto current = std::size_t{0};
  auto reap_at_end_of = [&](std::size_t interval) {
    auto boundary = origin + quantum * static_cast<std::int64_t>(interval + 1);
    for (auto& f : table.reap(boundary, policy))
      flows.push_back(std::move(f));
  };
  for (const auto& pkt : packets) {
    auto interval = std::max(current, interval_of(pkt.ts, origin, quantum));
    while (current < interval)
      reap_at_end_of(current++);
    if (auto event = table.handle_packet(pkt))
      if (auto* done = std::get_if<Concluded>(&*event))
        flows.push_back(std::move(done->flow));
  }
  reap_at_end_of(current);
  for (auto& f : table.flush())
    flows.push_back(std::move(f));
  return flows;
}

} // namespace itcm
