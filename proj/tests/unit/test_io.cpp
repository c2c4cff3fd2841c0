// SPDX-License-Identifier: Apache-2.0

#include "itcm/classifier.hpp"
#include "itcm/error.hpp"
#include "itcm/flow_csv.hpp"
#include "itcm/model_text.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace itcm {
namespace {

auto sample_rows(std::uint64_t seed, std::size_t n) -> std::vector<FlowCsvRow> {
  auto rng = std::mt19937_64{seed};
  auto rows = std::vector<FlowCsvRow>{};
  for (std::size_t i = 0; i < n; ++i) {
    auto label = i % 3 == 0 ? std::optional<std::string>{}
                            : std::optional<std::string>{"app" + std::to_string(i % 4)};
    rows.push_back(make_row(i, testing::random_flow(rng), label));
  }
  return rows;
}

auto to_text(std::span<const FlowCsvRow> rows) -> std::string {
  auto out = std::ostringstream{};
  write_flow_csv(out, rows);
  return out.str();
}

auto from_text(const std::string& text) -> std::vector<FlowCsvRow> {
  auto in = std::istringstream{text};
  return read_flow_csv(in);
}

auto error_line(const std::string& text) -> std::size_t {
  try {
    from_text(text);
  } catch (const DataError& e) {
    return e.line();
  }
  return 0;
}

auto header_with_features(std::size_t n) -> std::string {
  auto h = std::string{"flow_id,first_ts,initiator,responder"};
  for (std::size_t j = 0; j < n; ++j)
    h += "," + std::string{feature_names[j]};
  return h + ",label,reason\n";
}

// -- flow CSV -----------------------------------------------------------------

TEST(FlowCsv, RoundTripIsExact) {
  auto rows = sample_rows(1, 50);
  auto text = to_text(rows);
  EXPECT_EQ(from_text(text), rows);
  EXPECT_EQ(to_text(from_text(text)), text);
}

TEST(FlowCsv, ShortestRoundTripDecimal) {
  auto row = sample_rows(2, 1).front();
  row.features[0] = 3200.0 / 3.0;
  auto text = to_text(std::vector{row});
  EXPECT_NE(text.find(",1066.6666666666667,"), std::string::npos);
  EXPECT_EQ(from_text(text).front().features[0], 3200.0 / 3.0);
}

TEST(FlowCsv, StartsWithVersionMarkerAndHeader) {
  auto text = to_text({});
  EXPECT_EQ(text, "# itcm flows v1\n" + flow_csv_header() + "\n");
  EXPECT_TRUE(from_text(text).empty());
}

TEST(FlowCsv, ThirteenFeatureFileFailsOnFirstLine) {
  EXPECT_EQ(error_line(header_with_features(13)), 1u);
}

TEST(FlowCsv, HeaderMismatch) {
  auto header = header_with_features(14);
  header.replace(0, 7, "flow_no");
  EXPECT_EQ(error_line(header), 1u);
  EXPECT_THROW(from_text(""), DataError);
}

TEST(FlowCsv, NonNumericCellNamesLine) {
  auto text = to_text(sample_rows(3, 3));
  auto pos = text.find('\n', text.find('\n', text.find('\n') + 1) + 1);
  // Corrupt the first feature of the second data row (line 4).
  auto line_start = pos + 1;
  auto cell = line_start;
  for (int commas = 0; commas < 4; ++commas)
    cell = text.find(',', cell) + 1;
  text.replace(cell, text.find(',', cell) - cell, "abc");
  EXPECT_EQ(error_line(text), 4u);
  try {
    from_text(text);
  } catch (const DataError& e) {
    EXPECT_NE(std::string{e.what()}.find("abc"), std::string::npos);
  }
}

TEST(FlowCsv, EmptyLabelIsUnlabelled) {
  auto rows = sample_rows(4, 6);
  auto loaded = from_text(to_text(rows));
  auto ds = to_dataset(loaded);
  auto labelled = std::size_t{0};
  for (const auto& r : loaded)
    labelled += !r.label.empty();
  EXPECT_EQ(ds.size(), labelled);
  EXPECT_EQ(ds.size(), 4u);
  EXPECT_EQ(ds.n_features(), feature_count);
}

TEST(FlowCsv, MissingFileIsIoError) {
  auto dir = testing::TempDir{};
  EXPECT_THROW(read_flow_csv(dir.path() / "absent.csv"), IoError);
}

TEST(FlowCsv, FileRoundTrip) {
  auto dir = testing::TempDir{};
  auto rows = sample_rows(5, 20);
  EXPECT_EQ(write_flow_csv(dir.path() / "f.csv", rows), 20u);
  EXPECT_EQ(read_flow_csv(dir.path() / "f.csv"), rows);
}

// -- model files --------------------------------------------------------------

auto saved(const Classifier& m) -> std::string {
  auto out = std::ostringstream{};
  m.save(out);
  return out.str();
}

auto loaded(const std::string& text) -> std::unique_ptr<Classifier> {
  auto in = std::istringstream{text};
  return load_model(in);
}

class ModelRoundTrip : public ::testing::TestWithParam<Algorithm> {};

TEST_P(ModelRoundTrip, PredictionsAndBytesSurvive) {
  auto rng = std::mt19937_64{static_cast<std::uint64_t>(GetParam()) + 100};
  for (int trial = 0; trial < 10; ++trial) {
    auto ds = testing::random_dataset(rng, 25, 4, 3, 9);
    auto spec = LearnerSpec{};
    spec.algorithm = GetParam();
    spec.k = 3;
    auto m = train(ds, spec);
    auto text = saved(*m);
    auto back = loaded(text);
    EXPECT_EQ(back->algorithm(), GetParam());
    EXPECT_EQ(back->classes(), m->classes());
    EXPECT_EQ(saved(*back), text);
    for (int q = 0; q < 30; ++q) {
      auto x = testing::random_point(rng, 4, 9);
      EXPECT_EQ(back->predict_index(x), m->predict_index(x));
    }
  }
}

TEST_P(ModelRoundTrip, TruncatedFilesAreRejected) {
  auto rng = std::mt19937_64{7};
  auto ds = testing::random_dataset(rng, 12, 2, 3, 5);
  auto spec = LearnerSpec{};
  spec.algorithm = GetParam();
  auto text = saved(*train(ds, spec));
  for (auto pos = text.find('\n'); pos + 1 < text.size();
       pos = text.find('\n', pos + 1))
    EXPECT_THROW(loaded(text.substr(0, pos + 1)), ModelError)
      << "cut after byte " << pos;
}

INSTANTIATE_TEST_SUITE_P(All, ModelRoundTrip,
                         ::testing::ValuesIn(all_algorithms),
                         [](const auto& info) {
                           return std::string{to_string(info.param)};
                         });

TEST(ModelFile, RejectsCorruptHeaders) {
  auto m = train(Dataset::from_rows({{1}, {2}}, {"a", "b"}), LearnerSpec{});
  auto text = saved(*m);
  auto with = [&](std::string from, std::string to) {
    auto t = text;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_THROW(loaded(""), ModelError);
  EXPECT_THROW(loaded("garbage\n"), ModelError);
  EXPECT_THROW(loaded(with("itcm-model 1", "itcm-model 2")), ModelError);
  EXPECT_THROW(loaded(with("algorithm c45", "algorithm svm")), ModelError);
  EXPECT_THROW(loaded(with("class a\nclass b", "class b\nclass a")),
               ModelError);
  EXPECT_THROW(loaded(with("features 1", "features x")), ModelError);
  EXPECT_THROW(loaded(with("end", "more")), ModelError);
}

TEST(ModelFile, PathErrors) {
  auto dir = testing::TempDir{};
  EXPECT_THROW(load_model(dir.path() / "absent.model"), IoError);
  auto m = train(Dataset::from_rows({{1}, {2}}, {"a", "b"}), LearnerSpec{});
  EXPECT_THROW(save_model(*m, dir.path() / "no" / "such" / "dir.model"),
               IoError);
  save_model(*m, dir.path() / "ok.model");
  EXPECT_EQ(saved(*load_model(dir.path() / "ok.model")), saved(*m));
}

} // namespace
} // namespace itcm
