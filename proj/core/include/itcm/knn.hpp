// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/classifier.hpp"

namespace itcm {

struct KnnOptions {
  std::size_t k = 10;
  /// Min-max scale every feature to the training range before measuring
  /// distances. Off means raw Euclidean distance.
  bool scale = true;
};

/// Euclidean distance.
auto euclidean_distance(std::span<const double> a, std::span<const double> b)
  -> double;

class KnnModel final : public Classifier {
public:
  struct Neighbor {
    std::size_t index;
    double distance;
  };

  /// k is clamped to the training set size. Throws on an empty dataset.
  static auto train(const Dataset& ds, KnnOptions options = {}) -> KnnModel;

  auto algorithm() const -> Algorithm override {
    return Algorithm::knn;
  }
  auto predict_index(std::span<const double> x) const -> std::size_t override;

  /// The k nearest training points, nearest first; equal distances keep
  /// training order.
  auto neighbors(std::span<const double> x) const -> std::vector<Neighbor>;

  /// `x` mapped into the model's scaled space.
  auto scaled(std::span<const double> x) const -> std::vector<double>;

  auto k() const -> std::size_t {
    return k_;
  }
  auto scaling() const -> bool {
    return scale_;
  }
  auto size() const -> std::size_t {
    return labels_.size();
  }
  auto point(std::size_t i) const -> std::span<const double> {
    return {points_.data() + i * n_features_, n_features_};
  }
  auto point_label(std::size_t i) const -> std::size_t {
    return labels_[i];
  }

  static auto read_body(detail::ModelReader& in,
                        std::vector<std::string> classes,
                        std::size_t n_features) -> KnnModel;

protected:
  void write_body(std::ostream& out) const override;

private:
  KnnModel(std::vector<std::string> classes, std::size_t n_features)
    : Classifier{std::move(classes), n_features} {
  }

  std::size_t k_ = 10;
  bool scale_ = true;
  std::vector<double> mins_;
  std::vector<double> maxs_;
  std::vector<double> points_;
  std::vector<std::size_t> labels_;
};

} // namespace itcm
