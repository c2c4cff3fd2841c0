// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/classifier.hpp"

namespace itcm {

inline constexpr double variance_floor = 1e-6;
inline constexpr double density_floor = 1e-300;

/// log N(x; mean, variance).
auto log_gaussian(double x, double mean, double variance) -> double;

/// Gaussian naive Bayes. Scores are log prior plus the per-feature Gaussian
/// log densities; the evidence term is dropped since it does not change the
/// argmax.
class NaiveBayesModel final : public Classifier {
public:
  /// means and variances are indexed [class * n_features + feature].
  NaiveBayesModel(std::vector<std::string> classes, std::size_t n_features,
                  std::vector<double> priors, std::vector<double> means,
                  std::vector<double> variances);

  /// Maximum-likelihood fit with population variances floored at
  /// variance_floor.
  static auto train(const Dataset& ds) -> NaiveBayesModel;

  auto algorithm() const -> Algorithm override {
    return Algorithm::nb;
  }
  auto predict_index(std::span<const double> x) const -> std::size_t override;

  /// Unnormalised log posterior of every class.
  auto scores(std::span<const double> x) const -> std::vector<double>;

  auto priors() const -> const std::vector<double>& {
    return priors_;
  }
  auto mean(std::size_t c, std::size_t j) const -> double {
    return means_[c * n_features_ + j];
  }
  auto variance(std::size_t c, std::size_t j) const -> double {
    return variances_[c * n_features_ + j];
  }

  static auto read_body(detail::ModelReader& in,
                        std::vector<std::string> classes,
                        std::size_t n_features) -> NaiveBayesModel;

protected:
  void write_body(std::ostream& out) const override;

private:
  std::vector<double> priors_;
  std::vector<double> means_;
  std::vector<double> variances_;
};

/// Mean of Gaussian kernels of width `bandwidth` centred on `centers`.
auto kernel_density(std::span<const double> centers, double bandwidth,
                    double x) -> double;

/// Kernel (flexible) naive Bayes: each class-conditional feature density is a
/// Gaussian kernel estimate over that class's training values, with
/// bandwidth 1/sqrt(n_c).
class KernelNaiveBayesModel final : public Classifier {
public:
  /// centers[c][j] lists the training values of feature j in class c.
  KernelNaiveBayesModel(std::vector<std::string> classes,
                        std::size_t n_features, std::vector<double> priors,
                        std::vector<double> bandwidths,
                        std::vector<std::vector<std::vector<double>>> centers);

  static auto train(const Dataset& ds) -> KernelNaiveBayesModel;

  auto algorithm() const -> Algorithm override {
    return Algorithm::knb;
  }
  auto predict_index(std::span<const double> x) const -> std::size_t override;
  auto scores(std::span<const double> x) const -> std::vector<double>;

  auto priors() const -> const std::vector<double>& {
    return priors_;
  }
  auto bandwidth(std::size_t c) const -> double {
    return bandwidths_[c];
  }
  auto centers(std::size_t c, std::size_t j) const
    -> const std::vector<double>& {
    return centers_[c][j];
  }

  static auto read_body(detail::ModelReader& in,
                        std::vector<std::string> classes,
                        std::size_t n_features) -> KernelNaiveBayesModel;

protected:
  void write_body(std::ostream& out) const override;

private:
  std::vector<double> priors_;
  std::vector<double> bandwidths_;
  std::vector<std::vector<std::vector<double>>> centers_;
};

} // namespace itcm
