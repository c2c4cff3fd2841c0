// SPDX-License-Identifier: Apache-2.0

#include "itcm/classifier.hpp"

#include "itcm/adaboost.hpp"
#include "itcm/c45.hpp"
#include "itcm/error.hpp"
#include "itcm/knn.hpp"
#include "itcm/naive_bayes.hpp"

#include <fstream>
#include <ostream>

namespace itcm {

auto to_string(Algorithm algorithm) -> std::string_view {
  switch (algorithm) {
    case Algorithm::knn:
      return "knn";
    case Algorithm::nb:
      return "nb";
    case Algorithm::knb:
      return "knb";
    case Algorithm::c45:
      return "c45";
    case Algorithm::adaboost:
      return "adaboost";
  }
  return "unknown";
}

auto display_name(Algorithm algorithm) -> std::string_view {
  switch (algorithm) {
    case Algorithm::knn:
      return "K-Nearest Neighbor";
    case Algorithm::nb:
      return "Naive Bayes";
    case Algorithm::knb:
      return "Flexible Naive Bayes";
    case Algorithm::c45:
      return "C4.5 Decision Tree";
    case Algorithm::adaboost:
      return "AdaBoost (DecisionStump)";
  }
  return "unknown";
}

auto parse_algorithm(std::string_view name) -> std::optional<Algorithm> {
  for (auto a : all_algorithms)
    if (to_string(a) == name)
      return a;
  return std::nullopt;
}

void Classifier::check_input(std::span<const double> x) const {
  if (x.size() != n_features_)
    throw std::invalid_argument{"classifier expects "
                                + std::to_string(n_features_)
                                + " features, got "
                                + std::to_string(x.size())};
}

void Classifier::save(std::ostream& out) const {
  out << "itcm-model " << model_format_version << '\n';
  out << "algorithm " << to_string(algorithm()) << '\n';
  out << "features " << n_features_ << '\n';
  out << "classes " << classes_.size() << '\n';
  for (const auto& c : classes_)
    out << "class " << c << '\n';
  write_body(out);
  out << "end\n";
}

auto train(const Dataset& ds, const LearnerSpec& spec)
  -> std::unique_ptr<Classifier> {
  switch (spec.algorithm) {
    case Algorithm::knn:
      return std::make_unique<KnnModel>(
        KnnModel::train(ds, {spec.k, spec.knn_scaling}));
    case Algorithm::nb:
      return std::make_unique<NaiveBayesModel>(NaiveBayesModel::train(ds));
    case Algorithm::knb:
      return std::make_unique<KernelNaiveBayesModel>(
        KernelNaiveBayesModel::train(ds));
    case Algorithm::c45:
      return std::make_unique<C45Tree>(C45Tree::train(ds, spec.min_leaf));
    case Algorithm::adaboost:
      return std::make_unique<AdaBoostModel>(
        AdaBoostModel::train(ds, spec.rounds));
  }
  throw std::invalid_argument{"unknown algorithm"};
}

auto load_model(std::istream& in) -> std::unique_ptr<Classifier> {
  auto reader = detail::ModelReader{in};
  auto version = reader.expect_n("itcm-model", 1);
  if (reader.to_count(version[0])
      != static_cast<std::size_t>(model_format_version))
    reader.fail("unsupported model format version " + version[0]);
  auto name = reader.expect_n("algorithm", 1)[0];
  auto algorithm = parse_algorithm(name);
  if (!algorithm)
    reader.fail("unknown algorithm '" + name + "'");
  auto n_features = reader.to_count(reader.expect_n("features", 1)[0]);
  auto n_classes = reader.to_count(reader.expect_n("classes", 1)[0]);
  if (n_classes == 0)
    reader.fail("model without classes");
  auto classes = std::vector<std::string>{};
  for (std::size_t c = 0; c < n_classes; ++c) {
    classes.push_back(reader.expect_text("class"));
    if (classes.back().empty())
      reader.fail("empty class name");
    if (c > 0 && !(classes[c - 1] < classes[c]))
      reader.fail("class names must be sorted and unique");
  }
  auto model = std::unique_ptr<Classifier>{};
  switch (*algorithm) {
    case Algorithm::knn:
      model = std::make_unique<KnnModel>(
        KnnModel::read_body(reader, std::move(classes), n_features));
      break;
    case Algorithm::nb:
      model = std::make_unique<NaiveBayesModel>(
        NaiveBayesModel::read_body(reader, std::move(classes), n_features));
      break;
    case Algorithm::knb:
      model = std::make_unique<KernelNaiveBayesModel>(
        KernelNaiveBayesModel::read_body(reader, std::move(classes),
                                         n_features));
      break;
    case Algorithm::c45:
      model = std::make_unique<C45Tree>(
        C45Tree::read_body(reader, std::move(classes), n_features));
      break;
    case Algorithm::adaboost:
      model = std::make_unique<AdaBoostModel>(
        AdaBoostModel::read_body(reader, std::move(classes), n_features));
      break;
  }
  reader.expect_n("end", 0);
  return model;
}

auto load_model(const std::filesystem::path& path)
  -> std::unique_ptr<Classifier> {
  auto in = std::ifstream{path};
  if (!in)
    throw IoError{path.string() + ": cannot open model"};
  return load_model(in);
}

void save_model(const Classifier& model, const std::filesystem::path& path) {
  auto out = std::ofstream{path, std::ios::trunc};
  if (!out)
    throw IoError{path.string() + ": cannot create model file"};
  model.save(out);
  if (!out)
    throw IoError{path.string() + ": write failed"};
}

} // namespace itcm
