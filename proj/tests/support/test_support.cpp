// SPDX-License-Identifier: Apache-2.0

#include "test_support.hpp"

#include "itcm/c45.hpp"
#include "itcm/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace itcm::testing {

TempDir::TempDir() {
  auto rng = std::random_device{};
  auto base = std::filesystem::temp_directory_path();
  for (;;) {
    auto candidate = base / ("itcm-test-" + std::to_string(rng()));
    if (std::filesystem::create_directory(candidate)) {
      root_ = candidate;
      return;
    }
  }
}

TempDir::~TempDir() {
  auto ec = std::error_code{};
  std::filesystem::remove_all(root_, ec);
}

auto reader_for(std::span<const PacketRecord> packets,
                const pcap::WriterOptions& options) -> pcap::TraceReader {
  auto out = std::ostringstream{};
  pcap::write_trace(out, packets, options);
  return reader_for_bytes(out.str());
}

auto reader_for_bytes(const std::string& bytes) -> pcap::TraceReader {
  return pcap::TraceReader{std::make_unique<std::istringstream>(bytes),
                           "memory"};
}

auto make_packet(double t_seconds, Endpoint src, Endpoint dst, TcpFlags flags,
                 std::uint16_t payload) -> PacketRecord {
  auto p = PacketRecord{};
  p.ts = Timestamp{static_cast<std::int64_t>(std::llround(t_seconds * 1e6))};
  p.src = src;
  p.dst = dst;
  p.flags = flags;
  p.tcp_payload_length = payload;
  p.ip_total_length = static_cast<std::uint16_t>(40 + payload);
  return p;
}

auto random_dataset(std::mt19937_64& rng, std::size_t n,
                    std::size_t n_features, std::size_t n_classes, int levels)
  -> Dataset {
  auto value = std::uniform_int_distribution<int>{0, levels - 1};
  auto cls = std::uniform_int_distribution<std::size_t>{0, n_classes - 1};
  auto values = std::vector<double>{};
  auto labels = std::vector<std::string>{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n_features; ++j)
      values.push_back(static_cast<double>(value(rng)) * 0.5);
    auto c = i < n_classes ? i : cls(rng);
    labels.push_back("c" + std::to_string(c));
  }
  return Dataset{n_features, std::move(values), labels};
}

auto random_point(std::mt19937_64& rng, std::size_t n_features, int levels)
  -> std::vector<double> {
  auto value = std::uniform_int_distribution<int>{-1, levels};
  auto jitter = std::uniform_real_distribution<double>{-0.3, 0.3};
  auto off_grid = std::bernoulli_distribution{0.3};
  auto x = std::vector<double>{};
  for (std::size_t j = 0; j < n_features; ++j) {
    auto v = static_cast<double>(value(rng)) * 0.5;
    x.push_back(off_grid(rng) ? v + jitter(rng) : v);
  }
  return x;
}

namespace {

struct AppShape {
  const char* label;
  std::uint16_t port;
  int up_min, up_max, up_size_min, up_size_max;
  int down_min, down_max, down_size_min, down_size_max;
  double gap_s;
};

constexpr AppShape shapes[] = {
  {"domain", 53, 1, 1, 60, 80, 1, 1, 100, 300, 0.01},
  {"ftp", 21, 10, 20, 40, 80, 10, 20, 60, 120, 1.0},
  {"https", 443, 5, 8, 100, 300, 8, 12, 1000, 1400, 0.05},
  {"www-http", 80, 3, 4, 300, 600, 20, 40, 1400, 1500, 0.02},
};

auto flow_from(std::mt19937_64& rng, const AppShape& s, std::uint32_t client)
  -> FlowRecord {
  auto between = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>{lo, hi}(rng);
  };
  auto gap = std::exponential_distribution<double>{1.0 / s.gap_s};
  auto c = Endpoint{0x0a000000u | client, 40000};
  auto v = Endpoint{0xc0a80001u, s.port};
  auto up = between(s.up_min, s.up_max);
  auto down = between(s.down_min, s.down_max);
  auto t = 1000.0;
  auto first = make_packet(t, c, v, {.syn = true});
  auto flow = FlowRecord::open(first);
  auto from_client = std::vector<bool>(static_cast<std::size_t>(up - 1), true);
  from_client.insert(from_client.end(), static_cast<std::size_t>(down), false);
  std::shuffle(from_client.begin(), from_client.end(), rng);
  for (std::size_t i = 0; i < from_client.size(); ++i) {
    t += gap(rng);
    auto flags = TcpFlags{.ack = true, .psh = i % 3 == 0};
    if (from_client[i])
      flow.accumulate(make_packet(
        t, c, v, flags,
        static_cast<std::uint16_t>(between(s.up_size_min, s.up_size_max) - 40)));
    else
      flow.accumulate(make_packet(
        t, v, c, flags,
        static_cast<std::uint16_t>(between(s.down_size_min, s.down_size_max)
                                   - 40)));
  }
  flow.reason = ConclusionReason::fin_rst;
  return flow;
}

} // namespace

auto separable_flows(std::size_t per_class, std::uint64_t seed)
  -> std::vector<LabelledFlow> {
  auto rng = std::mt19937_64{seed};
  auto out = std::vector<LabelledFlow>{};
  auto client = std::uint32_t{1};
  for (std::size_t i = 0; i < per_class; ++i)
    for (const auto& s : shapes)
      out.push_back({flow_from(rng, s, client++), s.label});
  return out;
}

auto separable_dataset(std::size_t per_class, std::uint64_t seed) -> Dataset {
  auto flows = separable_flows(per_class, seed);
  auto values = std::vector<double>{};
  auto labels = std::vector<std::string>{};
  for (const auto& f : flows) {
    auto x = extract(f.flow);
    values.insert(values.end(), x.begin(), x.end());
    labels.push_back(f.label);
  }
  return Dataset{feature_count, std::move(values), labels};
}

auto random_flow(std::mt19937_64& rng) -> FlowRecord {
  auto between = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>{lo, hi}(rng);
  };
  auto a = Endpoint{static_cast<std::uint32_t>(rng()),
                    static_cast<std::uint16_t>(between(1, 65535))};
  auto b = Endpoint{static_cast<std::uint32_t>(rng()),
                    static_cast<std::uint16_t>(between(1, 65535))};
  auto t = static_cast<double>(between(0, 100000));
  auto flow = FlowRecord::open(make_packet(
    t, a, b, {.syn = true}, static_cast<std::uint16_t>(between(0, 20))));
  auto n = between(0, 30);
  for (int i = 0; i < n; ++i) {
    t += std::uniform_real_distribution<double>{0.0, 2.0}(rng);
    auto forward = between(0, 1) == 1;
    auto payload = static_cast<std::uint16_t>(between(0, 1460));
    auto flags = TcpFlags{.ack = true, .psh = between(0, 3) == 0};
    flow.accumulate(forward ? make_packet(t, a, b, flags, payload)
                            : make_packet(t, b, a, flags, payload));
  }
  return flow;
}

auto swap_direction(const FlowRecord& flow) -> FlowRecord {
  auto out = flow;
  std::swap(out.initiator, out.responder);
  std::swap(out.up, out.down);
  return out;
}

namespace oracle {

namespace {

auto min_max_scaled(const Dataset& ds, bool scale)
  -> std::pair<std::vector<std::vector<double>>, std::vector<std::pair<double, double>>> {
  auto nf = ds.n_features();
  auto ranges = std::vector<std::pair<double, double>>(nf);
  for (std::size_t j = 0; j < nf; ++j) {
    auto lo = ds.value(0, j);
    auto hi = ds.value(0, j);
    for (std::size_t i = 1; i < ds.size(); ++i) {
      lo = std::min(lo, ds.value(i, j));
      hi = std::max(hi, ds.value(i, j));
    }
    ranges[j] = {lo, hi};
  }
  auto rows = std::vector<std::vector<double>>{};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto r = std::vector<double>(ds.row(i).begin(), ds.row(i).end());
    if (scale)
      for (std::size_t j = 0; j < nf; ++j) {
        auto span = ranges[j].second - ranges[j].first;
        r[j] = span > 0.0 ? (r[j] - ranges[j].first) / span : 0.0;
      }
    rows.push_back(std::move(r));
  }
  return {rows, ranges};
}

auto near_best(const std::vector<double>& scores, double tie)
  -> std::vector<std::size_t> {
  auto best = *std::max_element(scores.begin(), scores.end());
  auto out = std::vector<std::size_t>{};
  for (std::size_t c = 0; c < scores.size(); ++c)
    if (scores[c] >= best - tie * std::max(1.0, std::abs(best)))
      out.push_back(c);
  return out;
}

auto rows_of_class(const Dataset& ds, std::size_t c) -> std::vector<std::size_t> {
  auto out = std::vector<std::size_t>{};
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (ds.label(i) == c)
      out.push_back(i);
  return out;
}

auto entropy(const std::vector<double>& counts) -> double {
  auto total = 0.0;
  for (auto c : counts)
    total += c;
  auto h = 0.0;
  for (auto c : counts)
    if (c > 0)
      h -= (c / total) * std::log2(c / total);
  return h;
}

auto distinct_values(const Dataset& ds, const std::vector<std::size_t>& rows,
                     std::size_t j) -> std::vector<double> {
  auto v = std::vector<double>{};
  for (auto r : rows)
    v.push_back(ds.value(r, j));
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

auto midpoint(double lo, double hi) -> double {
  auto mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

auto heaviest(const std::vector<double>& w) -> std::size_t {
  auto best = std::size_t{0};
  for (std::size_t c = 1; c < w.size(); ++c)
    if (w[c] > w[best] + 1e-12)
      best = c;
  return best;
}

} // namespace

auto knn_predict(const Dataset& ds, std::size_t k, bool scale,
                 std::span<const double> x) -> std::size_t {
  auto [rows, ranges] = min_max_scaled(ds, scale);
  auto q = std::vector<double>(x.begin(), x.end());
  if (scale)
    for (std::size_t j = 0; j < q.size(); ++j) {
      auto span = ranges[j].second - ranges[j].first;
      q[j] = span > 0.0 ? (q[j] - ranges[j].first) / span : 0.0;
    }
  auto all = std::vector<std::pair<double, std::size_t>>{};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto sum = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j)
      sum += (q[j] - rows[i][j]) * (q[j] - rows[i][j]);
    all.emplace_back(std::sqrt(sum), i);
  }
  std::sort(all.begin(), all.end());
  k = std::min(k, all.size());
  auto votes = std::vector<std::size_t>(ds.class_count(), 0);
  auto dist = std::vector<double>(ds.class_count(), 0.0);
  for (std::size_t n = 0; n < k; ++n) {
    ++votes[ds.label(all[n].second)];
    dist[ds.label(all[n].second)] += all[n].first;
  }
  auto best = std::optional<std::size_t>{};
  for (std::size_t c = 0; c < votes.size(); ++c) {
    if (votes[c] == 0)
      continue;
    if (!best || votes[c] > votes[*best]
        || (votes[c] == votes[*best]
            && dist[c] / static_cast<double>(votes[c])
                 < dist[*best] / static_cast<double>(votes[*best])))
      best = c;
  }
  return *best;
}

auto nb_best(const Dataset& ds, std::span<const double> x, double tie)
  -> std::vector<std::size_t> {
  auto scores = std::vector<double>{};
  for (std::size_t c = 0; c < ds.class_count(); ++c) {
    auto rows = rows_of_class(ds, c);
    auto n = static_cast<double>(rows.size());
    auto s = std::log(n / static_cast<double>(ds.size()));
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
      auto mu = 0.0;
      for (auto r : rows)
        mu += ds.value(r, j);
      mu /= n;
      auto var = 0.0;
      for (auto r : rows)
        var += (ds.value(r, j) - mu) * (ds.value(r, j) - mu);
      var = std::max(var / n, 1e-6);
      s += -0.5 * std::log(2.0 * std::numbers::pi * var)
           - (x[j] - mu) * (x[j] - mu) / (2.0 * var);
    }
    scores.push_back(s);
  }
  return near_best(scores, tie);
}

auto kernel_density(std::span<const double> centers, double bandwidth,
                    double x) -> double {
  auto sum = 0.0;
  for (auto mu : centers) {
    auto z = (x - mu) / bandwidth;
    sum += std::exp(-0.5 * z * z) / (bandwidth * std::sqrt(2.0 * std::numbers::pi));
  }
  return sum / static_cast<double>(centers.size());
}

auto knb_best(const Dataset& ds, std::span<const double> x, double tie)
  -> std::vector<std::size_t> {
  auto scores = std::vector<double>{};
  for (std::size_t c = 0; c < ds.class_count(); ++c) {
    auto rows = rows_of_class(ds, c);
    auto n = static_cast<double>(rows.size());
    auto bw = 1.0 / std::sqrt(n);
    auto s = std::log(n / static_cast<double>(ds.size()));
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
      auto centers = std::vector<double>{};
      for (auto r : rows)
        centers.push_back(ds.value(r, j));
      s += std::log(std::max(kernel_density(centers, bw, x[j]), 1e-300));
    }
    scores.push_back(s);
  }
  return near_best(scores, tie);
}

auto best_split(const Dataset& ds, const std::vector<std::size_t>& rows)
  -> std::optional<Split> {
  auto k = ds.class_count();
  auto parent = std::vector<double>(k, 0.0);
  for (auto r : rows)
    parent[ds.label(r)] += 1.0;
  auto h = entropy(parent);
  auto n = static_cast<double>(rows.size());
  auto best = std::optional<Split>{};
  for (std::size_t j = 0; j < ds.n_features(); ++j) {
    auto values = distinct_values(ds, rows, j);
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      auto theta = midpoint(values[v], values[v + 1]);
      auto left = std::vector<double>(k, 0.0);
      auto right = std::vector<double>(k, 0.0);
      for (auto r : rows)
        (ds.value(r, j) <= theta ? left : right)[ds.label(r)] += 1.0;
      auto nl = 0.0;
      for (auto c : left)
        nl += c;
      auto nr = n - nl;
      auto gain = h - nl / n * entropy(left) - nr / n * entropy(right);
      if (gain <= 1e-12)
        continue;
      auto ratio = gain / entropy({nl, nr});
      if (!best || ratio > best->ratio + 1e-12)
        best = Split{j, theta, gain, ratio};
    }
  }
  return best;
}

auto c45_predict(const Dataset& ds, std::size_t min_leaf,
                 std::span<const double> x) -> std::size_t {
  auto rows = std::vector<std::size_t>(ds.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i] = i;
  for (;;) {
    auto counts = std::vector<std::size_t>(ds.class_count(), 0);
    for (auto r : rows)
      ++counts[ds.label(r)];
    auto majority = std::size_t{0};
    for (std::size_t c = 1; c < counts.size(); ++c)
      if (counts[c] > counts[majority])
        majority = c;
    if (counts[majority] == rows.size() || rows.size() < 2 * min_leaf)
      return majority;
    auto split = best_split(ds, rows);
    if (!split)
      return majority;
    auto side = std::vector<std::size_t>{};
    auto go_left = x[split->feature] <= split->threshold;
    for (auto r : rows)
      if ((ds.value(r, split->feature) <= split->threshold) == go_left)
        side.push_back(r);
    rows = std::move(side);
  }
}

auto fit_stump(const Dataset& ds, std::span<const double> weights)
  -> StumpFit {
  auto k = ds.class_count();
  auto total = std::vector<double>(k, 0.0);
  for (std::size_t i = 0; i < ds.size(); ++i)
    total[ds.label(i)] += weights[i];
  auto h = heaviest(total);
  auto fallback_error = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (ds.label(i) != h)
      fallback_error += weights[i];
  auto best = std::optional<StumpFit>{};
  auto all = std::vector<std::size_t>(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i)
    all[i] = i;
  for (std::size_t j = 0; j < ds.n_features(); ++j) {
    auto values = distinct_values(ds, all, j);
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      auto theta = midpoint(values[v], values[v + 1]);
      auto left = std::vector<double>(k, 0.0);
      auto right = std::vector<double>(k, 0.0);
      for (std::size_t i = 0; i < ds.size(); ++i)
        (ds.value(i, j) <= theta ? left : right)[ds.label(i)] += weights[i];
      auto stump = Stump{j, theta, heaviest(left), heaviest(right)};
      auto error = 0.0;
      for (std::size_t i = 0; i < ds.size(); ++i)
        if (stump.predict(ds.row(i)) != ds.label(i))
          error += weights[i];
      if (!best || error < best->error - 1e-12)
        best = StumpFit{stump, error};
    }
  }
  if (!best)
    return StumpFit{Stump{0, 0.0, h, h}, fallback_error};
  return *best;
}

auto adaboost_predict(const Dataset& ds, std::size_t rounds,
                      std::span<const double> x) -> std::size_t {
  auto n = ds.size();
  auto w = std::vector<double>(n, 1.0 / static_cast<double>(n));
  auto votes = std::vector<double>(ds.class_count(), 0.0);
  auto any = false;
  for (std::size_t t = 0; t < rounds; ++t) {
    auto fit = oracle::fit_stump(ds, w);
    if (fit.error >= 0.5) {
      if (!any)
        votes[fit.stump.predict(x)] += 1.0;
      break;
    }
    any = true;
    auto zero = fit.error <= 1e-12;
    auto beta = zero ? 1e-10 : fit.error / (1.0 - fit.error);
    votes[fit.stump.predict(x)] += std::log(1.0 / beta);
    if (zero)
      break;
    auto sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (fit.stump.predict(ds.row(i)) == ds.label(i))
        w[i] *= beta;
      sum += w[i];
    }
    for (auto& v : w)
      v /= sum;
  }
  auto best = std::size_t{0};
  for (std::size_t c = 1; c < votes.size(); ++c)
    if (votes[c] > votes[best])
      best = c;
  return best;
}

} // namespace oracle

} // namespace itcm::testing
