// SPDX-License-Identifier: Apache-2.0

#include "itcm/naive_bayes.hpp"

#include "itcm/number_text.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace itcm {

namespace {

auto argmax(const std::vector<double>& scores) -> std::size_t {
  auto best = std::size_t{0};
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best])
      best = c;
  return best;
}

auto class_priors(const Dataset& ds) -> std::vector<double> {
  auto counts = ds.class_counts();
  auto priors = std::vector<double>{};
  for (auto n : counts) {
    if (n == 0)
      throw std::invalid_argument{"naive bayes: class without instances"};
    priors.push_back(static_cast<double>(n) / static_cast<double>(ds.size()));
  }
  return priors;
}

void write_priors(std::ostream& out, const std::vector<double>& priors) {
  for (auto p : priors)
    out << "prior " << format_double(p) << '\n';
}

auto read_priors(detail::ModelReader& in, std::size_t classes)
  -> std::vector<double> {
  auto priors = std::vector<double>{};
  for (std::size_t c = 0; c < classes; ++c)
    priors.push_back(in.to_double(in.expect_n("prior", 1)[0]));
  return priors;
}

} // namespace

auto log_gaussian(double x, double mean, double variance) -> double {
  auto d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance)
         - d * d / (2.0 * variance);
}

// -- NaiveBayesModel ---------------------------------------------------------

NaiveBayesModel::NaiveBayesModel(std::vector<std::string> classes,
                                 std::size_t n_features,
                                 std::vector<double> priors,
                                 std::vector<double> means,
                                 std::vector<double> variances)
  : Classifier{std::move(classes), n_features},
    priors_{std::move(priors)},
    means_{std::move(means)},
    variances_{std::move(variances)} {
  auto cells = classes_.size() * n_features_;
  if (priors_.size() != classes_.size() || means_.size() != cells
      || variances_.size() != cells)
    throw std::invalid_argument{"naive bayes: parameter shape mismatch"};
}

auto NaiveBayesModel::train(const Dataset& ds) -> NaiveBayesModel {
  if (ds.empty())
    throw std::invalid_argument{"naive bayes: empty training set"};
  auto n = ds.n_features();
  auto k = ds.class_count();
  auto priors = class_priors(ds);
  auto counts = ds.class_counts();
  auto means = std::vector<double>(k * n, 0.0);
  auto variances = std::vector<double>(k * n, 0.0);
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t j = 0; j < n; ++j)
      means[ds.label(i) * n + j] += ds.value(i, j);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < n; ++j)
      means[c * n + j] /= static_cast<double>(counts[c]);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto d = ds.value(i, j) - means[ds.label(i) * n + j];
      variances[ds.label(i) * n + j] += d * d;
    }
  }
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < n; ++j)
      variances[c * n + j] = std::max(
        variances[c * n + j] / static_cast<double>(counts[c]), variance_floor);
  return NaiveBayesModel{ds.classes(), n, std::move(priors), std::move(means),
                         std::move(variances)};
}

auto NaiveBayesModel::scores(std::span<const double> x) const
  -> std::vector<double> {
  check_input(x);
  auto out = std::vector<double>(classes_.size());
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    auto s = std::log(priors_[c]);
    for (std::size_t j = 0; j < n_features_; ++j)
      s += log_gaussian(x[j], mean(c, j), variance(c, j));
    out[c] = s;
  }
  return out;
}

auto NaiveBayesModel::predict_index(std::span<const double> x) const
  -> std::size_t {
  return argmax(scores(x));
}

void NaiveBayesModel::write_body(std::ostream& out) const {
  write_priors(out, priors_);
  for (std::size_t c = 0; c < classes_.size(); ++c)
    for (std::size_t j = 0; j < n_features_; ++j)
      out << "gaussian " << c << ' ' << j << ' ' << format_double(mean(c, j))
          << ' ' << format_double(variance(c, j)) << '\n';
}

auto NaiveBayesModel::read_body(detail::ModelReader& in,
                                std::vector<std::string> classes,
                                std::size_t n_features) -> NaiveBayesModel {
  auto k = classes.size();
  auto priors = read_priors(in, k);
  auto means = std::vector<double>{};
  auto variances = std::vector<double>{};
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < n_features; ++j) {
      auto f = in.expect_n("gaussian", 4);
      if (in.to_count(f[0]) != c || in.to_count(f[1]) != j)
        in.fail("gaussian parameters out of order");
      means.push_back(in.to_double(f[2]));
      variances.push_back(in.to_double(f[3]));
      if (!(variances.back() > 0.0))
        in.fail("variance must be positive");
    }
  }
  return NaiveBayesModel{std::move(classes), n_features, std::move(priors),
                         std::move(means), std::move(variances)};
}

// -- KernelNaiveBayesModel ---------------------------------------------------

auto kernel_density(std::span<const double> centers, double bandwidth,
                    double x) -> double {
  if (centers.empty())
    return 0.0;
  auto norm = 1.0 / (bandwidth * std::sqrt(2.0 * std::numbers::pi));
  auto sum = 0.0;
  for (auto mu : centers) {
    auto z = (x - mu) / bandwidth;
    sum += norm * std::exp(-0.5 * z * z);
  }
  return sum / static_cast<double>(centers.size());
}

KernelNaiveBayesModel::KernelNaiveBayesModel(
  std::vector<std::string> classes, std::size_t n_features,
  std::vector<double> priors, std::vector<double> bandwidths,
  std::vector<std::vector<std::vector<double>>> centers)
  : Classifier{std::move(classes), n_features},
    priors_{std::move(priors)},
    bandwidths_{std::move(bandwidths)},
    centers_{std::move(centers)} {
  if (priors_.size() != classes_.size() || bandwidths_.size() != classes_.size()
      || centers_.size() != classes_.size())
    throw std::invalid_argument{"kernel naive bayes: parameter shape mismatch"};
  for (const auto& per_class : centers_)
    if (per_class.size() != n_features_)
      throw std::invalid_argument{"kernel naive bayes: feature count mismatch"};
}

auto KernelNaiveBayesModel::train(const Dataset& ds) -> KernelNaiveBayesModel {
  if (ds.empty())
    throw std::invalid_argument{"kernel naive bayes: empty training set"};
  auto n = ds.n_features();
  auto k = ds.class_count();
  auto priors = class_priors(ds);
  auto counts = ds.class_counts();
  auto bandwidths = std::vector<double>{};
  for (auto nc : counts)
    bandwidths.push_back(1.0 / std::sqrt(static_cast<double>(nc)));
  auto centers = std::vector<std::vector<std::vector<double>>>(
    k, std::vector<std::vector<double>>(n));
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t j = 0; j < n; ++j)
      centers[ds.label(i)][j].push_back(ds.value(i, j));
  return KernelNaiveBayesModel{ds.classes(), n, std::move(priors),
                               std::move(bandwidths), std::move(centers)};
}

auto KernelNaiveBayesModel::scores(std::span<const double> x) const
  -> std::vector<double> {
  check_input(x);
  auto out = std::vector<double>(classes_.size());
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    auto s = std::log(priors_[c]);
    for (std::size_t j = 0; j < n_features_; ++j)
      s += std::log(std::max(
        kernel_density(centers_[c][j], bandwidths_[c], x[j]), density_floor));
    out[c] = s;
  }
  return out;
}

auto KernelNaiveBayesModel::predict_index(std::span<const double> x) const
  -> std::size_t {
  return argmax(scores(x));
}

void KernelNaiveBayesModel::write_body(std::ostream& out) const {
  write_priors(out, priors_);
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    out << "bandwidth " << format_double(bandwidths_[c]) << '\n';
    for (std::size_t j = 0; j < n_features_; ++j) {
      out << "centers " << centers_[c][j].size();
      for (auto v : centers_[c][j])
        out << ' ' << format_double(v);
      out << '\n';
    }
  }
}

auto KernelNaiveBayesModel::read_body(detail::ModelReader& in,
                                      std::vector<std::string> classes,
                                      std::size_t n_features)
  -> KernelNaiveBayesModel {
  auto k = classes.size();
  auto priors = read_priors(in, k);
  auto bandwidths = std::vector<double>{};
  auto centers = std::vector<std::vector<std::vector<double>>>(k);
  for (std::size_t c = 0; c < k; ++c) {
    bandwidths.push_back(in.to_double(in.expect_n("bandwidth", 1)[0]));
    if (!(bandwidths.back() > 0.0))
      in.fail("bandwidth must be positive");
    for (std::size_t j = 0; j < n_features; ++j) {
      auto f = in.expect("centers");
      if (f.empty() || in.to_count(f[0]) != f.size() - 1)
        in.fail("centers count does not match its values");
      auto& values = centers[c].emplace_back();
      for (std::size_t i = 1; i < f.size(); ++i)
        values.push_back(in.to_double(f[i]));
    }
  }
  return KernelNaiveBayesModel{std::move(classes), n_features,
                               std::move(priors), std::move(bandwidths),
                               std::move(centers)};
}

} // namespace itcm
