// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/dataset.hpp"
#include "itcm/model_text.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace itcm {

enum class Algorithm { knn, nb, knb, c45, adaboost };

inline constexpr Algorithm all_algorithms[] = {
  Algorithm::c45, Algorithm::adaboost, Algorithm::knn, Algorithm::nb,
  Algorithm::knb,
};

/// Short name used on the command line and in model files.
auto to_string(Algorithm algorithm) -> std::string_view;
auto display_name(Algorithm algorithm) -> std::string_view;
auto parse_algorithm(std::string_view name) -> std::optional<Algorithm>;

/// Which learner to train and its hyperparameters.
struct LearnerSpec {
  Algorithm algorithm = Algorithm::c45;
  std::size_t k = 10;
  bool knn_scaling = true;
  std::size_t rounds = 10;
  std::size_t min_leaf = 2;
};

inline constexpr int model_format_version = 1;

/// A trained model. Immutable after training, so one instance may serve any
/// number of concurrent predictions.
class Classifier {
public:
  virtual ~Classifier() = default;

  virtual auto algorithm() const -> Algorithm = 0;

  /// Index into classes() of the predicted label.
  virtual auto predict_index(std::span<const double> x) const
    -> std::size_t = 0;

  auto predict(std::span<const double> x) const -> const std::string& {
    return classes_[predict_index(x)];
  }

  auto classes() const -> const std::vector<std::string>& {
    return classes_;
  }
  auto n_features() const -> std::size_t {
    return n_features_;
  }

  /// Writes the versioned text form; load_model reads it back.
  void save(std::ostream& out) const;

protected:
  Classifier(std::vector<std::string> classes, std::size_t n_features)
    : classes_{std::move(classes)}, n_features_{n_features} {
  }

  virtual void write_body(std::ostream& out) const = 0;

  void check_input(std::span<const double> x) const;

  std::vector<std::string> classes_;
  std::size_t n_features_ = 0;
};

auto train(const Dataset& ds, const LearnerSpec& spec)
  -> std::unique_ptr<Classifier>;

auto load_model(std::istream& in) -> std::unique_ptr<Classifier>;
auto load_model(const std::filesystem::path& path)
  -> std::unique_ptr<Classifier>;
void save_model(const Classifier& model, const std::filesystem::path& path);

} // namespace itcm
