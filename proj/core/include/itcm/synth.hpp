// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/packet.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace itcm {

/// Parameters of the synthetic TCP session generator. Fractions are
/// per-session probabilities of the corresponding irregularity.
struct SynthConfig {
  std::size_t sessions = 100;
  /// Keep adding sessions until at least this many packets exist (0: off).
  std::size_t min_packets = 0;
  std::uint64_t seed = 1;
  /// Session start times are spread uniformly over this many seconds.
  double span_seconds = 300.0;
  /// Stray non-SYN packet for an unknown key.
  double orphan_fraction = 0.05;
  /// Session ends with RST instead of FIN.
  double rst_fraction = 0.1;
  /// A lone SYN that is never answered.
  double unanswered_fraction = 0.05;
  /// Session never closes; it is left to the reaper or the final flush.
  double idle_fraction = 0.05;
  /// Session reuses the endpoints of an earlier one.
  double reuse_fraction = 0.05;
  /// Handshake oddities: duplicated SYN, missing SYN+ACK, missing ACK.
  double handshake_noise = 0.1;
  Timestamp start = std::chrono::seconds{1'300'000'000};

  /// Only well-formed handshake, data, FIN sessions: one flow per session.
  static auto clean(std::size_t sessions, std::uint64_t seed) -> SynthConfig;
};

/// One generated conversation. `app` is the ground-truth application
/// profile ("unknown" for unmapped ports, "orphan" for stray packets).
struct SynthSession {
  std::string app;
  Endpoint client;
  Endpoint server;
  std::vector<PacketRecord> packets;
};

auto generate_sessions(const SynthConfig& config) -> std::vector<SynthSession>;

/// All packets of `sessions` merged in timestamp order (stable for ties).
auto merge_sessions(const std::vector<SynthSession>& sessions)
  -> std::vector<PacketRecord>;

auto generate_trace(const SynthConfig& config) -> std::vector<PacketRecord>;

} // namespace itcm
