// SPDX-License-Identifier: Apache-2.0

#include "itcm/synth.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace itcm {

namespace {

struct AppProfile {
  const char* app;
  std::uint16_t port;
  int min_exchanges;
  int max_exchanges;
  int up_min;
  int up_max;
  int down_min;
  int down_max;
  /// Response segments per exchange.
  int down_segments;
  /// Mean think time between exchanges, seconds.
  double think_s;
};

constexpr AppProfile profiles[] = {
  {"www-http", 80, 1, 4, 200, 600, 600, 1460, 3, 0.2},
  {"https", 443, 3, 8, 80, 300, 300, 1400, 2, 0.5},
  {"ftp", 21, 4, 10, 6, 40, 20, 90, 1, 2.0},
  {"domain", 53, 1, 1, 28, 60, 80, 400, 1, 0.0},
  {"unknown", 6881, 6, 16, 1000, 1460, 0, 0, 0, 0.05},
};

class Generator {
public:
  explicit Generator(const SynthConfig& config)
    : config_{config}, rng_{config.seed} {
  }

  auto run() -> std::vector<SynthSession> {
    auto sessions = std::vector<SynthSession>{};
    auto packets = std::size_t{0};
    while (sessions.size() < config_.sessions
           || (config_.min_packets > 0 && packets < config_.min_packets)) {
      sessions.push_back(next_session(sessions));
      packets += sessions.back().packets.size();
    }
    return sessions;
  }

private:
  auto chance(double p) -> bool {
    return p > 0.0 && std::uniform_real_distribution<double>{0.0, 1.0}(rng_) < p;
  }

  auto between(int lo, int hi) -> int {
    return std::uniform_int_distribution<int>{lo, hi}(rng_);
  }

  auto micros(double seconds) -> Duration {
    return Duration{static_cast<std::int64_t>(seconds * 1e6)};
  }

  auto rtt() -> Duration {
    return micros(std::uniform_real_distribution<double>{0.001, 0.08}(rng_));
  }

  auto exp_gap(double mean_s) -> Duration {
    if (mean_s <= 0.0)
      return Duration{0};
    return micros(std::exponential_distribution<double>{1.0 / mean_s}(rng_));
  }

  /// 10.0.0.0/16 clients with ephemeral ports, never handed out twice.
  auto fresh_client() -> Endpoint {
    for (;;) {
      auto ep = Endpoint{
        0x0a000000u | static_cast<std::uint32_t>(between(1, 65534)),
        static_cast<std::uint16_t>(between(1024, 65535))};
      if (used_.insert(ep).second)
        return ep;
    }
  }

  auto server_for(std::uint16_t port) -> Endpoint {
    return Endpoint{0xc0a80000u | static_cast<std::uint32_t>(between(1, 254)),
                    port};
  }

  auto packet(Timestamp ts, Endpoint src, Endpoint dst, int payload,
              TcpFlags flags) -> PacketRecord {
    auto p = PacketRecord{};
    p.ts = ts;
    p.src = src;
    p.dst = dst;
    p.tcp_payload_length = static_cast<std::uint16_t>(payload);
    p.ip_total_length = static_cast<std::uint16_t>(40 + payload);
    p.seq = static_cast<std::uint32_t>(rng_());
    p.flags = flags;
    return p;
  }

  auto start_time() -> Timestamp {
    return config_.start
           + micros(std::uniform_real_distribution<double>{
             0.0, config_.span_seconds}(rng_));
  }

  auto next_session(const std::vector<SynthSession>& earlier) -> SynthSession {
    if (chance(config_.orphan_fraction))
      return orphan();
    const auto& profile
      = profiles[std::uniform_int_distribution<std::size_t>{
        0, std::size(profiles) - 1}(rng_)];
    auto s = SynthSession{};
    s.app = profile.app;
    s.client = fresh_client();
    s.server = server_for(profile.port);
    if (!earlier.empty() && chance(config_.reuse_fraction)) {
      const auto& old = earlier[std::uniform_int_distribution<std::size_t>{
        0, earlier.size() - 1}(rng_)];
      if (old.app != "orphan") {
        s.app = old.app;
        s.client = old.client;
        s.server = old.server;
      }
    }
    auto t = start_time();
    auto& out = s.packets;
    auto c = s.client;
    auto v = s.server;

    out.push_back(packet(t, c, v, 0, {.syn = true}));
    if (chance(config_.unanswered_fraction))
      return s;
    if (chance(config_.handshake_noise))
      out.push_back(packet(t += rtt(), c, v, 0, {.syn = true}));
    if (!chance(config_.handshake_noise))
      out.push_back(packet(t += rtt(), v, c, 0, {.syn = true, .ack = true}));
    if (!chance(config_.handshake_noise))
      out.push_back(packet(t += rtt(), c, v, 0, {.ack = true}));

    auto exchanges = between(profile.min_exchanges, profile.max_exchanges);
    for (int e = 0; e < exchanges; ++e) {
      if (e > 0)
        t += exp_gap(profile.think_s);
      out.push_back(packet(t += rtt(), c, v,
                           between(profile.up_min, profile.up_max),
                           {.ack = true, .psh = true}));
      for (int d = 0; d < profile.down_segments; ++d) {
        auto last = d + 1 == profile.down_segments;
        out.push_back(packet(t += rtt(), v, c,
                             between(profile.down_min, profile.down_max),
                             {.ack = true, .psh = last}));
      }
      if (profile.down_segments == 0 || chance(0.5))
        out.push_back(packet(t += rtt(), profile.down_segments ? c : v,
                             profile.down_segments ? v : c, 0, {.ack = true}));
    }

    if (chance(config_.idle_fraction))
      return s;
    if (chance(config_.rst_fraction)) {
      auto from_server = chance(0.5);
      out.push_back(packet(t += rtt(), from_server ? v : c,
                           from_server ? c : v, 0, {.rst = true}));
    } else {
      out.push_back(packet(t += rtt(), c, v, 0, {.ack = true, .fin = true}));
    }
    return s;
  }

  auto orphan() -> SynthSession {
    auto s = SynthSession{};
    s.app = "orphan";
    s.client = fresh_client();
    s.server = server_for(static_cast<std::uint16_t>(between(1, 65535)));
    auto t = start_time();
    auto n = between(1, 3);
    for (int i = 0; i < n; ++i)
      s.packets.push_back(packet(t += rtt(), s.client, s.server,
                                 between(0, 100), {.ack = true}));
    return s;
  }

  const SynthConfig& config_;
  std::mt19937_64 rng_;
  std::set<Endpoint> used_;
};

} // namespace

auto SynthConfig::clean(std::size_t sessions, std::uint64_t seed)
  -> SynthConfig {
  auto c = SynthConfig{};
  c.sessions = sessions;
  c.seed = seed;
  c.orphan_fraction = 0.0;
  c.rst_fraction = 0.0;
  c.unanswered_fraction = 0.0;
  c.idle_fraction = 0.0;
  c.reuse_fraction = 0.0;
  c.handshake_noise = 0.0;
  return c;
}

auto generate_sessions(const SynthConfig& config)
  -> std::vector<SynthSession> {
  return Generator{config}.run();
}

auto merge_sessions(const std::vector<SynthSession>& sessions)
  -> std::vector<PacketRecord> {
  auto all = std::vector<PacketRecord>{};
  for (const auto& s : sessions)
    all.insert(all.end(), s.packets.begin(), s.packets.end());
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.ts < b.ts; });
  return all;
}

auto generate_trace(const SynthConfig& config) -> std::vector<PacketRecord> {
  return merge_sessions(generate_sessions(config));
}

} // namespace itcm
