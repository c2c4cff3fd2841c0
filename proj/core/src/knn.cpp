// SPDX-License-Identifier: Apache-2.0

#include "itcm/knn.hpp"

#include "itcm/number_text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace itcm {

auto euclidean_distance(std::span<const double> a, std::span<const double> b)
  -> double {
  auto sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

auto KnnModel::train(const Dataset& ds, KnnOptions options) -> KnnModel {
  if (ds.empty())
    throw std::invalid_argument{"knn: empty training set"};
  if (options.k == 0)
    throw std::invalid_argument{"knn: k must be at least 1"};
  auto model = KnnModel{ds.classes(), ds.n_features()};
  model.k_ = std::min(options.k, ds.size());
  model.scale_ = options.scale;
  auto n = ds.n_features();
  model.mins_.assign(n, std::numeric_limits<double>::infinity());
  model.maxs_.assign(n, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      model.mins_[j] = std::min(model.mins_[j], ds.value(i, j));
      model.maxs_[j] = std::max(model.maxs_[j], ds.value(i, j));
    }
  }
  model.points_.reserve(ds.size() * n);
  model.labels_.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto p = model.scaled(ds.row(i));
    model.points_.insert(model.points_.end(), p.begin(), p.end());
    model.labels_.push_back(ds.label(i));
  }
  return model;
}

auto KnnModel::scaled(std::span<const double> x) const -> std::vector<double> {
  auto out = std::vector<double>(x.begin(), x.end());
  if (!scale_)
    return out;
  for (std::size_t j = 0; j < out.size(); ++j) {
    auto range = maxs_[j] - mins_[j];
    out[j] = range > 0.0 ? (out[j] - mins_[j]) / range : 0.0;
  }
  return out;
}

auto KnnModel::neighbors(std::span<const double> x) const
  -> std::vector<Neighbor> {
  check_input(x);
  auto q = scaled(x);
  auto all = std::vector<Neighbor>{};
  all.reserve(size());
  for (std::size_t i = 0; i < size(); ++i)
    all.push_back({i, euclidean_distance(q, point(i))});
  auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance
           || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<long>(k_),
                    all.end(), closer);
  all.resize(k_);
  return all;
}

auto KnnModel::predict_index(std::span<const double> x) const -> std::size_t {
  auto near = neighbors(x);
  auto votes = std::vector<std::size_t>(classes_.size(), 0);
  auto distance_sum = std::vector<double>(classes_.size(), 0.0);
  for (const auto& n : near) {
    ++votes[labels_[n.index]];
    distance_sum[labels_[n.index]] += n.distance;
  }
  auto best = std::size_t{0};
  for (std::size_t c = 1; c < classes_.size(); ++c) {
    if (votes[c] == 0)
      continue;
    if (votes[c] > votes[best]) {
      best = c;
    } else if (votes[c] == votes[best]) {
      auto mean_c = distance_sum[c] / static_cast<double>(votes[c]);
      auto mean_best = distance_sum[best] / static_cast<double>(votes[best]);
      if (mean_c < mean_best)
        best = c;
    }
  }
  return best;
}

void KnnModel::write_body(std::ostream& out) const {
  out << "k " << k_ << '\n';
  out << "scaling " << (scale_ ? 1 : 0) << '\n';
  for (std::size_t j = 0; j < n_features_; ++j)
    out << "range " << format_double(mins_[j]) << ' '
        << format_double(maxs_[j]) << '\n';
  out << "points " << size() << '\n';
  for (std::size_t i = 0; i < size(); ++i) {
    out << "p " << labels_[i];
    for (auto v : point(i))
      out << ' ' << format_double(v);
    out << '\n';
  }
}

auto KnnModel::read_body(detail::ModelReader& in,
                         std::vector<std::string> classes,
                         std::size_t n_features) -> KnnModel {
  auto model = KnnModel{std::move(classes), n_features};
  model.k_ = in.to_count(in.expect_n("k", 1)[0]);
  model.scale_ = in.to_count(in.expect_n("scaling", 1)[0]) != 0;
  for (std::size_t j = 0; j < n_features; ++j) {
    auto f = in.expect_n("range", 2);
    model.mins_.push_back(in.to_double(f[0]));
    model.maxs_.push_back(in.to_double(f[1]));
  }
  auto count = in.to_count(in.expect_n("points", 1)[0]);
  if (model.k_ == 0 || model.k_ > count)
    in.fail("k must lie in [1, points]");
  for (std::size_t i = 0; i < count; ++i) {
    auto f = in.expect_n("p", n_features + 1);
    auto label = in.to_count(f[0]);
    if (label >= model.classes_.size())
      in.fail("label index out of range");
    model.labels_.push_back(label);
    for (std::size_t j = 0; j < n_features; ++j)
      model.points_.push_back(in.to_double(f[j + 1]));
  }
  return model;
}

} // namespace itcm
