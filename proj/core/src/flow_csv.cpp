// SPDX-License-Identifier: Apache-2.0

#include "itcm/flow_csv.hpp"

#include "itcm/error.hpp"
#include "itcm/number_text.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace itcm {

namespace {

auto split(std::string_view line) -> std::vector<std::string_view> {
  auto out = std::vector<std::string_view>{};
  auto start = std::size_t{0};
  for (;;) {
    auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return out;
}

template <class T>
auto parse_int(std::string_view text) -> std::optional<T> {
  auto v = T{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty())
    return std::nullopt;
  return v;
}

auto format_seconds(Timestamp ts) -> std::string {
  auto micros = ts.count();
  auto sign = micros < 0 ? "-" : "";
  auto magnitude = micros < 0 ? -micros : micros;
  auto frac = std::to_string(magnitude % 1'000'000);
  return std::string{sign} + std::to_string(magnitude / 1'000'000) + "."
         + std::string(6 - frac.size(), '0') + frac;
}

auto parse_seconds(std::string_view text) -> std::optional<Timestamp> {
  auto negative = !text.empty() && text.front() == '-';
  if (negative)
    text.remove_prefix(1);
  auto dot = text.find('.');
  auto whole = parse_int<std::int64_t>(text.substr(0, dot));
  if (!whole)
    return std::nullopt;
  auto micros = std::int64_t{0};
  if (dot != std::string_view::npos) {
    auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 6)
      return std::nullopt;
    auto digits = parse_int<std::int64_t>(frac);
    if (!digits)
      return std::nullopt;
    micros = *digits;
    for (auto n = frac.size(); n < 6; ++n)
      micros *= 10;
  }
  auto total = *whole * 1'000'000 + micros;
  return Timestamp{negative ? -total : total};
}

auto parse_endpoint(std::string_view text) -> std::optional<Endpoint> {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos)
    return std::nullopt;
  auto port = parse_int<std::uint16_t>(text.substr(colon + 1));
  if (!port)
    return std::nullopt;
  auto ip = std::uint32_t{0};
  auto octets = text.substr(0, colon);
  for (int i = 0; i < 4; ++i) {
    auto dot = octets.find('.');
    if ((i < 3) == (dot == std::string_view::npos))
      return std::nullopt;
    auto octet = parse_int<unsigned>(octets.substr(0, dot));
    if (!octet || *octet > 255)
      return std::nullopt;
    ip = (ip << 8) | *octet;
    octets = dot == std::string_view::npos ? std::string_view{}
                                           : octets.substr(dot + 1);
  }
  return Endpoint{ip, *port};
}

auto parse_reason(std::string_view text) -> std::optional<ConclusionReason> {
  for (auto r : {ConclusionReason::fin_rst, ConclusionReason::timeout,
                 ConclusionReason::flush})
    if (to_string(r) == text)
      return r;
  return std::nullopt;
}

} // namespace

auto flow_csv_header() -> const std::string& {
  static const auto header = [] {
    auto h = std::string{"flow_id,first_ts,initiator,responder"};
    for (auto name : feature_names)
      h += "," + std::string{name};
    h += ",label,reason";
    return h;
  }();
  return header;
}

auto make_row(std::uint64_t flow_id, const FlowRecord& flow,
              const std::optional<std::string>& label) -> FlowCsvRow {
  return FlowCsvRow{flow_id,        flow.first_ts,        flow.initiator,
                    flow.responder, extract(flow),        label.value_or(""),
                    flow.reason};
}

void write_flow_csv(std::ostream& out, std::span<const FlowCsvRow> rows) {
  out << "# itcm flows v1\n" << flow_csv_header() << '\n';
  for (const auto& r : rows) {
    out << r.flow_id << ',' << format_seconds(r.first_ts) << ','
        << to_string(r.initiator) << ',' << to_string(r.responder);
    for (auto v : r.features)
      out << ',' << format_double(v);
    out << ',' << r.label << ',' << to_string(r.reason) << '\n';
  }
}

auto write_flow_csv(const std::filesystem::path& path,
                    std::span<const FlowCsvRow> rows) -> std::size_t {
  auto out = std::ofstream{path, std::ios::binary | std::ios::trunc};
  if (!out)
    throw IoError{path.string() + ": cannot create CSV"};
  write_flow_csv(out, rows);
  if (!out)
    throw IoError{path.string() + ": write failed"};
  return rows.size();
}

auto read_flow_csv(std::istream& in) -> std::vector<FlowCsvRow> {
  auto rows = std::vector<FlowCsvRow>{};
  auto line = std::string{};
  auto number = std::size_t{0};
  auto seen_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (!seen_header && !line.empty() && line.front() == '#')
      continue;
    if (line.empty())
      continue;
    auto cells = split(line);
    if (cells.size() != flow_csv_columns)
      throw DataError{number, "expected " + std::to_string(flow_csv_columns)
                                + " columns, found "
                                + std::to_string(cells.size())};
    if (!seen_header) {
      if (line != flow_csv_header())
        throw DataError{number, "header does not match flow CSV schema v1"};
      seen_header = true;
      continue;
    }
    auto row = FlowCsvRow{};
    auto id = parse_int<std::uint64_t>(cells[0]);
    if (!id)
      throw DataError{number, "invalid flow_id '" + std::string{cells[0]}
                                + "'"};
    row.flow_id = *id;
    auto ts = parse_seconds(cells[1]);
    if (!ts)
      throw DataError{number, "invalid first_ts '" + std::string{cells[1]}
                                + "'"};
    row.first_ts = *ts;
    auto initiator = parse_endpoint(cells[2]);
    auto responder = parse_endpoint(cells[3]);
    if (!initiator || !responder)
      throw DataError{number, "invalid endpoint"};
    row.initiator = *initiator;
    row.responder = *responder;
    for (std::size_t j = 0; j < feature_count; ++j) {
      auto v = parse_double(cells[4 + j]);
      if (!v)
        throw DataError{number, "non-numeric value '"
                                  + std::string{cells[4 + j]}
                                  + "' in column "
                                  + std::string{feature_names[j]}};
      row.features[j] = *v;
    }
    row.label = std::string{cells[4 + feature_count]};
    auto reason = parse_reason(cells[5 + feature_count]);
    if (!reason)
      throw DataError{number, "unknown conclusion reason '"
                                + std::string{cells[5 + feature_count]}
                                + "'"};
    row.reason = *reason;
    rows.push_back(std::move(row));
  }
  if (!seen_header)
    throw DataError{number, "missing flow CSV header"};
  return rows;
}

auto read_flow_csv(const std::filesystem::path& path)
  -> std::vector<FlowCsvRow> {
  auto in = std::ifstream{path, std::ios::binary};
  if (!in)
    throw IoError{path.string() + ": cannot open CSV"};
  return read_flow_csv(in);
}

auto to_dataset(std::span<const FlowCsvRow> rows) -> Dataset {
  auto values = std::vector<double>{};
  auto labels = std::vector<std::string>{};
  for (const auto& r : rows) {
    if (r.label.empty())
      continue;
    values.insert(values.end(), r.features.begin(), r.features.end());
    labels.push_back(r.label);
  }
  return Dataset{feature_count, std::move(values), labels};
}

} // namespace itcm
