// SPDX-License-Identifier: Apache-2.0

#include "itcm/cross_validation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace itcm {

auto uniform_below(std::mt19937_64& rng, std::uint64_t bound)
  -> std::uint64_t {
  // Largest multiple of bound that fits; draws above it are rejected.
  auto limit = std::numeric_limits<std::uint64_t>::max()
               - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    auto draw = rng();
    if (draw < limit)
      return draw % bound;
  }
}

void shuffle_indices(std::vector<std::size_t>& indices, std::uint64_t seed) {
  auto rng = std::mt19937_64{seed};
  for (auto i = indices.size(); i > 1; --i) {
    auto j = uniform_below(rng, i);
    std::swap(indices[i - 1], indices[j]);
  }
}

auto stratified_folds(const Dataset& ds, std::size_t folds, std::uint64_t seed)
  -> std::vector<std::size_t> {
  if (folds < 2)
    throw std::invalid_argument{"cross-validation needs at least 2 folds"};
  if (folds > ds.size())
    throw std::invalid_argument{"cross-validation: more folds ("
                                + std::to_string(folds) + ") than instances ("
                                + std::to_string(ds.size()) + ")"};
  auto order = std::vector<std::size_t>(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle_indices(order, seed);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return ds.label(a) < ds.label(b);
                   });
  auto assignment = std::vector<std::size_t>(ds.size());
  for (std::size_t p = 0; p < order.size(); ++p)
    assignment[order[p]] = p % folds;
  return assignment;
}

auto cross_validate(const Dataset& ds, const LearnerSpec& spec,
                    std::size_t folds, std::uint64_t seed) -> CvResult {
  auto assignment = stratified_folds(ds, folds, seed);
  auto result = CvResult{};
  result.classes = ds.classes();
  result.confusion.assign(ds.class_count(),
                          std::vector<std::size_t>(ds.class_count(), 0));
  for (std::size_t f = 0; f < folds; ++f) {
    auto train_rows = std::vector<std::size_t>{};
    auto test_rows = std::vector<std::size_t>{};
    for (std::size_t i = 0; i < ds.size(); ++i)
      (assignment[i] == f ? test_rows : train_rows).push_back(i);
    auto model = train(ds.subset(train_rows), spec);
    for (auto i : test_rows) {
      const auto& name = model->predict(ds.row(i));
      auto predicted = static_cast<std::size_t>(
        std::lower_bound(result.classes.begin(), result.classes.end(), name)
        - result.classes.begin());
      ++result.confusion[ds.label(i)][predicted];
      if (predicted == ds.label(i))
        ++result.correct;
      ++result.total;
    }
  }
  return result;
}

} // namespace itcm
