// SPDX-License-Identifier: Apache-2.0

#include "itcm/dataset.hpp"

#include <algorithm>

namespace itcm {

Dataset::Dataset(std::size_t n_features, std::vector<double> values,
                 const std::vector<std::string>& labels)
  : n_features_{n_features}, values_{std::move(values)} {
  if (values_.size() != n_features_ * labels.size())
    throw std::invalid_argument{"dataset: value count does not match "
                                "rows x features"};
  classes_ = labels;
  std::sort(classes_.begin(), classes_.end());
  classes_.erase(std::unique(classes_.begin(), classes_.end()),
                 classes_.end());
  labels_.reserve(labels.size());
  for (const auto& l : labels) {
    auto it = std::lower_bound(classes_.begin(), classes_.end(), l);
    labels_.push_back(static_cast<std::size_t>(it - classes_.begin()));
  }
}

auto Dataset::from_rows(const std::vector<std::vector<double>>& rows,
                        const std::vector<std::string>& labels) -> Dataset {
  if (rows.size() != labels.size())
    throw std::invalid_argument{"dataset: row and label counts differ"};
  auto n = rows.empty() ? std::size_t{0} : rows.front().size();
  auto values = std::vector<double>{};
  values.reserve(n * rows.size());
  for (const auto& r : rows) {
    if (r.size() != n)
      throw std::invalid_argument{"dataset: rows differ in dimensionality"};
    values.insert(values.end(), r.begin(), r.end());
  }
  return Dataset{n, std::move(values), labels};
}

auto Dataset::class_counts() const -> std::vector<std::size_t> {
  auto counts = std::vector<std::size_t>(classes_.size(), 0);
  for (auto l : labels_)
    ++counts[l];
  return counts;
}

auto Dataset::subset(std::span<const std::size_t> indices) const -> Dataset {
  auto values = std::vector<double>{};
  values.reserve(indices.size() * n_features_);
  auto labels = std::vector<std::string>{};
  labels.reserve(indices.size());
  for (auto i : indices) {
    auto r = row(i);
    values.insert(values.end(), r.begin(), r.end());
    labels.push_back(classes_[labels_[i]]);
  }
  return Dataset{n_features_, std::move(values), labels};
}

} // namespace itcm
