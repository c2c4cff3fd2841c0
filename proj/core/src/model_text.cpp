// SPDX-License-Identifier: Apache-2.0

#include "itcm/model_text.hpp"

#include "itcm/number_text.hpp"

#include <charconv>
#include <istream>
#include <sstream>

namespace itcm::detail {

auto ModelReader::next_line() -> std::string {
  auto line = std::string{};
  while (std::getline(in_, line)) {
    ++line_number_;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (!line.empty())
      return line;
  }
  fail("unexpected end of model file");
}

void ModelReader::fail(const std::string& message) const {
  throw ModelError{"model line " + std::to_string(line_number_) + ": "
                   + message};
}

auto ModelReader::expect_text(std::string_view key) -> std::string {
  auto line = next_line();
  auto space = line.find(' ');
  auto word = std::string_view{line}.substr(0, space);
  if (word != key)
    fail("expected '" + std::string{key} + "', found '" + std::string{word}
         + "'");
  return space == std::string::npos ? std::string{} : line.substr(space + 1);
}

auto ModelReader::expect(std::string_view key) -> std::vector<std::string> {
  auto rest = std::istringstream{expect_text(key)};
  auto fields = std::vector<std::string>{};
  for (auto field = std::string{}; rest >> field;)
    fields.push_back(field);
  return fields;
}

auto ModelReader::next_fields() -> std::vector<std::string> {
  auto line = std::istringstream{next_line()};
  auto fields = std::vector<std::string>{};
  for (auto field = std::string{}; line >> field;)
    fields.push_back(field);
  return fields;
}

auto ModelReader::expect_n(std::string_view key, std::size_t n)
  -> std::vector<std::string> {
  auto fields = expect(key);
  if (fields.size() != n)
    fail("'" + std::string{key} + "' takes " + std::to_string(n)
         + " fields, found " + std::to_string(fields.size()));
  return fields;
}

auto ModelReader::to_double(const std::string& field) const -> double {
  auto v = parse_double(field);
  if (!v)
    fail("not a number: '" + field + "'");
  return *v;
}

auto ModelReader::to_count(const std::string& field) const -> std::size_t {
  auto v = std::size_t{};
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(),
                                   v);
  if (ec != std::errc{} || end != field.data() + field.size())
    fail("not a count: '" + field + "'");
  return v;
}

} // namespace itcm::detail
