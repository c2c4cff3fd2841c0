// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace itcm {

/// Labelled instances in row-major order. Class names are kept sorted, so a
/// class index order is also the lexicographic label order used by every
/// tie-break.
class Dataset {
public:
  Dataset() = default;

  /// `values` holds labels.size() rows of `n_features` values each.
  Dataset(std::size_t n_features, std::vector<double> values,
          const std::vector<std::string>& labels);

  static auto from_rows(const std::vector<std::vector<double>>& rows,
                        const std::vector<std::string>& labels) -> Dataset;

  auto size() const -> std::size_t {
    return labels_.size();
  }
  auto empty() const -> bool {
    return labels_.empty();
  }
  auto n_features() const -> std::size_t {
    return n_features_;
  }
  auto row(std::size_t i) const -> std::span<const double> {
    return {values_.data() + i * n_features_, n_features_};
  }
  auto value(std::size_t i, std::size_t feature) const -> double {
    return values_[i * n_features_ + feature];
  }
  auto label(std::size_t i) const -> std::size_t {
    return labels_[i];
  }
  auto label_name(std::size_t i) const -> const std::string& {
    return classes_[labels_[i]];
  }
  auto classes() const -> const std::vector<std::string>& {
    return classes_;
  }
  auto class_count() const -> std::size_t {
    return classes_.size();
  }
  auto class_counts() const -> std::vector<std::size_t>;

  /// Rows at `indices` in that order. The class list shrinks to the labels
  /// that still occur.
  auto subset(std::span<const std::size_t> indices) const -> Dataset;

  friend auto operator==(const Dataset&, const Dataset&) -> bool = default;

private:
  std::size_t n_features_ = 0;
  std::vector<double> values_;
  std::vector<std::size_t> labels_;
  std::vector<std::string> classes_;
};

} // namespace itcm
