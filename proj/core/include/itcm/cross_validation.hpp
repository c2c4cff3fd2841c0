// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/classifier.hpp"

#include <cstdint>
#include <random>

namespace itcm {

/// Uniform integer in [0, bound) from a 64-bit Mersenne Twister by rejection
/// sampling, so fold assignment does not depend on the standard library's
/// distribution implementation.
auto uniform_below(std::mt19937_64& rng, std::uint64_t bound) -> std::uint64_t;

/// Fisher-Yates shuffle driven by uniform_below.
void shuffle_indices(std::vector<std::size_t>& indices, std::uint64_t seed);

/// Fold index of every instance: a seeded shuffle, then the shuffled
/// instances grouped by class (lexicographic class order) are dealt to folds
/// round-robin with one running counter.
auto stratified_folds(const Dataset& ds, std::size_t folds, std::uint64_t seed)
  -> std::vector<std::size_t>;

struct CvResult {
  std::vector<std::string> classes;
  /// confusion[actual][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  std::size_t correct = 0;
  std::size_t total = 0;

  auto accuracy() const -> double {
    return total == 0 ? 0.0
                      : static_cast<double>(correct)
                          / static_cast<double>(total);
  }

  friend auto operator==(const CvResult&, const CvResult&) -> bool = default;
};

/// Stratified k-fold cross-validation; deterministic for a fixed seed.
auto cross_validate(const Dataset& ds, const LearnerSpec& spec,
                    std::size_t folds = 10, std::uint64_t seed = 1)
  -> CvResult;

} // namespace itcm
