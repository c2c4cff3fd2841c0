// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/classifier.hpp"

namespace itcm {

/// Score differences below this are treated as ties, so that equal scores
/// computed along different arithmetic paths resolve the same way.
inline constexpr double score_tolerance = 1e-12;

/// Shannon entropy in bits of a class histogram.
auto entropy_bits(std::span<const std::size_t> counts) -> double;

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  double gain_ratio = 0.0;
};

/// Midpoint between two consecutive distinct values, kept inside [lo, hi).
auto midpoint_threshold(double lo, double hi) -> double;

/// Highest gain-ratio binary split `x[feature] <= threshold` over the given
/// rows among splits with positive information gain. Ties go to the lowest
/// feature index, then the lowest threshold.
auto best_split(const Dataset& ds, std::span<const std::size_t> rows)
  -> std::optional<SplitCandidate>;

/// C4.5-style tree: binary numeric splits chosen by gain ratio, grown until
/// a node is pure, smaller than 2 * min_leaf, or has no positive-gain split.
/// No pruning.
class C45Tree final : public Classifier {
public:
  struct Node {
    bool leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t label = 0;
    std::vector<std::size_t> distribution;
  };

  static auto train(const Dataset& ds, std::size_t min_leaf = 2) -> C45Tree;

  auto algorithm() const -> Algorithm override {
    return Algorithm::c45;
  }
  auto predict_index(std::span<const double> x) const -> std::size_t override;

  /// Index of the leaf `x` lands in.
  auto leaf_of(std::span<const double> x) const -> std::size_t;

  auto nodes() const -> const std::vector<Node>& {
    return nodes_;
  }
  auto root() const -> const Node& {
    return nodes_.front();
  }
  auto leaf_count() const -> std::size_t;
  auto depth() const -> std::size_t;

  static auto read_body(detail::ModelReader& in,
                        std::vector<std::string> classes,
                        std::size_t n_features) -> C45Tree;

protected:
  void write_body(std::ostream& out) const override;

private:
  C45Tree(std::vector<std::string> classes, std::size_t n_features)
    : Classifier{std::move(classes), n_features} {
  }

  std::vector<Node> nodes_;
};

} // namespace itcm
