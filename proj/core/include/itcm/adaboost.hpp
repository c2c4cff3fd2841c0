// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/classifier.hpp"

#include <functional>

namespace itcm {

/// One-split tree: `x[feature] <= threshold` predicts `left`, else `right`.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;

  auto predict(std::span<const double> x) const -> std::size_t {
    return x[feature] <= threshold ? left : right;
  }

  friend auto operator==(const Stump&, const Stump&) -> bool = default;
};

struct StumpFit {
  Stump stump;
  double error = 0.0;
};

/// Exhaustive weighted stump search over every feature and midpoint
/// threshold. Each side predicts its heaviest class. Ties go to the lowest
/// feature, then the lowest threshold, then the lowest class index.
auto fit_stump(const Dataset& ds, std::span<const double> weights)
  -> StumpFit;

/// Sum of the weights of instances `stump` gets wrong.
auto weighted_error(const Stump& stump, const Dataset& ds,
                    std::span<const double> weights) -> double;

inline constexpr double zero_error_beta = 1e-10;

/// AdaBoost.M1 over multiclass decision stumps with weighted-majority voting.
class AdaBoostModel final : public Classifier {
public:
  struct Round {
    Stump stump;
    /// log(1 / beta)
    double weight = 0.0;
  };

  /// Snapshot of one boosting round, for inspection.
  struct RoundTrace {
    std::size_t round = 0;
    StumpFit fit;
    double beta = 0.0;
    bool kept = false;
    /// Instance weights after the update (unchanged if the round stopped
    /// training).
    std::vector<double> weights;
  };
  using Observer = std::function<void(const RoundTrace&)>;

  AdaBoostModel(std::vector<std::string> classes, std::size_t n_features,
                std::vector<Round> rounds);

  static auto train(const Dataset& ds, std::size_t rounds = 10,
                    const Observer& observer = {}) -> AdaBoostModel;

  auto algorithm() const -> Algorithm override {
    return Algorithm::adaboost;
  }
  auto predict_index(std::span<const double> x) const -> std::size_t override;

  auto rounds() const -> const std::vector<Round>& {
    return rounds_;
  }

  static auto read_body(detail::ModelReader& in,
                        std::vector<std::string> classes,
                        std::size_t n_features) -> AdaBoostModel;

protected:
  void write_body(std::ostream& out) const override;

private:
  std::vector<Round> rounds_;
};

} // namespace itcm
