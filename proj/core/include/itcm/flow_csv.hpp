// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/dataset.hpp"
#include "itcm/features.hpp"
#include "itcm/flow.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace itcm {

/// Thrown for malformed flow CSV input; the message names the line.
class DataError : public std::runtime_error {
public:
  DataError(std::size_t line, const std::string& message)
    : std::runtime_error{"line " + std::to_string(line) + ": " + message},
      line_{line} {
  }

  auto line() const -> std::size_t {
    return line_;
  }

private:
  std::size_t line_;
};

/// One flow of the versioned flow CSV (schema 1).
struct FlowCsvRow {
  std::uint64_t flow_id = 0;
  Timestamp first_ts{0};
  Endpoint initiator;
  Endpoint responder;
  FeatureVector features{};
  /// Empty when the flow is unlabelled.
  std::string label;
  ConclusionReason reason = ConclusionReason::flush;

  friend auto operator==(const FlowCsvRow&, const FlowCsvRow&) -> bool
    = default;
};

inline constexpr std::size_t flow_csv_columns = 4 + feature_count + 2;

/// The exact header line of schema version 1.
auto flow_csv_header() -> const std::string&;

auto make_row(std::uint64_t flow_id, const FlowRecord& flow,
              const std::optional<std::string>& label) -> FlowCsvRow;

/// Writes a `# itcm flows v1` comment, the header, then one line per row.
/// Output bytes depend only on the rows.
void write_flow_csv(std::ostream& out, std::span<const FlowCsvRow> rows);
auto write_flow_csv(const std::filesystem::path& path,
                    std::span<const FlowCsvRow> rows) -> std::size_t;

auto read_flow_csv(std::istream& in) -> std::vector<FlowCsvRow>;
auto read_flow_csv(const std::filesystem::path& path)
  -> std::vector<FlowCsvRow>;

/// Labelled rows as a 14-feature Dataset, in file order.
auto to_dataset(std::span<const FlowCsvRow> rows) -> Dataset;

} // namespace itcm
