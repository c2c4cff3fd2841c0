// SPDX-License-Identifier: Apache-2.0

#include "itcm/adaboost.hpp"

#include "itcm/c45.hpp"
#include "itcm/number_text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace itcm {

namespace {

auto heaviest(const std::vector<double>& w) -> std::size_t {
  auto best = std::size_t{0};
  for (std::size_t c = 1; c < w.size(); ++c)
    if (w[c] > w[best] + score_tolerance)
      best = c;
  return best;
}

} // namespace

auto weighted_error(const Stump& stump, const Dataset& ds,
                    std::span<const double> weights) -> double {
  auto error = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (stump.predict(ds.row(i)) != ds.label(i))
      error += weights[i];
  return error;
}

auto fit_stump(const Dataset& ds, std::span<const double> weights)
  -> StumpFit {
  if (ds.empty())
    throw std::invalid_argument{"stump: empty training set"};
  auto k = ds.class_count();
  auto total = std::vector<double>(k, 0.0);
  for (std::size_t i = 0; i < ds.size(); ++i)
    total[ds.label(i)] += weights[i];
  auto weight_sum = std::accumulate(total.begin(), total.end(), 0.0);

  auto fallback = heaviest(total);
  auto best = StumpFit{Stump{0, 0.0, fallback, fallback},
                       weight_sum - total[fallback]};
  auto found = false;

  auto order = std::vector<std::size_t>(ds.size());
  auto left = std::vector<double>(k);
  auto right = std::vector<double>(k);
  for (std::size_t j = 0; j < ds.n_features(); ++j) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return ds.value(a, j) < ds.value(b, j);
                     });
    std::fill(left.begin(), left.end(), 0.0);
    for (std::size_t p = 0; p + 1 < order.size(); ++p) {
      auto i = order[p];
      left[ds.label(i)] += weights[i];
      auto here = ds.value(i, j);
      auto next = ds.value(order[p + 1], j);
      if (here == next)
        continue;
      for (std::size_t c = 0; c < k; ++c)
        right[c] = total[c] - left[c];
      auto l = heaviest(left);
      auto r = heaviest(right);
      auto error = weight_sum - left[l] - right[r];
      if (!found || error < best.error - score_tolerance) {
        best = StumpFit{Stump{j, midpoint_threshold(here, next), l, r}, error};
        found = true;
      }
    }
  }
  return best;
}

AdaBoostModel::AdaBoostModel(std::vector<std::string> classes,
                             std::size_t n_features, std::vector<Round> rounds)
  : Classifier{std::move(classes), n_features}, rounds_{std::move(rounds)} {
}

auto AdaBoostModel::train(const Dataset& ds, std::size_t rounds,
                          const Observer& observer) -> AdaBoostModel {
  if (ds.empty())
    throw std::invalid_argument{"adaboost: empty training set"};
  if (rounds == 0)
    throw std::invalid_argument{"adaboost: at least one round required"};
  auto n = ds.size();
  auto weights = std::vector<double>(n, 1.0 / static_cast<double>(n));
  auto kept = std::vector<Round>{};
  for (std::size_t t = 0; t < rounds; ++t) {
    auto trace = RoundTrace{};
    trace.round = t;
    trace.fit = fit_stump(ds, weights);
    auto epsilon = trace.fit.error;
    if (epsilon >= 0.5) {
      // A first round that is no better than chance still has to classify:
      // keep its stump alone, as the boosting literature's reference
      // implementation does.
      if (kept.empty()) {
        kept.push_back({trace.fit.stump, 1.0});
        trace.kept = true;
      }
      trace.weights = weights;
      if (observer)
        observer(trace);
      break;
    }
    auto stop = epsilon <= score_tolerance;
    auto beta = stop ? zero_error_beta : epsilon / (1.0 - epsilon);
    trace.beta = beta;
    trace.kept = true;
    kept.push_back({trace.fit.stump, std::log(1.0 / beta)});
    if (!stop) {
      auto sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (trace.fit.stump.predict(ds.row(i)) == ds.label(i))
          weights[i] *= beta;
        sum += weights[i];
      }
      for (auto& w : weights)
        w /= sum;
    }
    trace.weights = weights;
    if (observer)
      observer(trace);
    if (stop)
      break;
  }
  return AdaBoostModel{ds.classes(), ds.n_features(), std::move(kept)};
}

auto AdaBoostModel::predict_index(std::span<const double> x) const
  -> std::size_t {
  check_input(x);
  auto votes = std::vector<double>(classes_.size(), 0.0);
  for (const auto& r : rounds_)
    votes[r.stump.predict(x)] += r.weight;
  auto best = std::size_t{0};
  for (std::size_t c = 1; c < votes.size(); ++c)
    if (votes[c] > votes[best])
      best = c;
  return best;
}

void AdaBoostModel::write_body(std::ostream& out) const {
  out << "rounds " << rounds_.size() << '\n';
  for (const auto& r : rounds_)
    out << "round " << format_double(r.weight) << ' ' << r.stump.feature << ' '
        << format_double(r.stump.threshold) << ' ' << r.stump.left << ' '
        << r.stump.right << '\n';
}

auto AdaBoostModel::read_body(detail::ModelReader& in,
                              std::vector<std::string> classes,
                              std::size_t n_features) -> AdaBoostModel {
  auto count = in.to_count(in.expect_n("rounds", 1)[0]);
  auto rounds = std::vector<Round>{};
  for (std::size_t t = 0; t < count; ++t) {
    auto f = in.expect_n("round", 5);
    auto r = Round{};
    r.weight = in.to_double(f[0]);
    r.stump.feature = in.to_count(f[1]);
    r.stump.threshold = in.to_double(f[2]);
    r.stump.left = in.to_count(f[3]);
    r.stump.right = in.to_count(f[4]);
    if (r.stump.feature >= n_features || r.stump.left >= classes.size()
        || r.stump.right >= classes.size())
      in.fail("stump refers to an unknown feature or class");
    if (!(r.weight > 0.0))
      in.fail("round weight must be positive");
    rounds.push_back(r);
  }
  return AdaBoostModel{std::move(classes), n_features, std::move(rounds)};
}

} // namespace itcm
