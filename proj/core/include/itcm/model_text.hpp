// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace itcm {

class ModelError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Line-oriented reader for the model file format: each line is a keyword
/// followed by space-separated fields.
class ModelReader {
public:
  explicit ModelReader(std::istream& in) : in_{in} {
  }

  /// Next non-empty line's fields after checking its keyword is `key`.
  auto expect(std::string_view key) -> std::vector<std::string>;

  /// Fields of the next line, keyword first.
  auto next_fields() -> std::vector<std::string>;

  /// Like expect, but returns the remainder of the line verbatim.
  auto expect_text(std::string_view key) -> std::string;

  auto to_double(const std::string& field) const -> double;
  auto to_count(const std::string& field) const -> std::size_t;

  /// Fields of `expect(key)`, requiring exactly `n` of them.
  auto expect_n(std::string_view key, std::size_t n)
    -> std::vector<std::string>;

  [[noreturn]] void fail(const std::string& message) const;

  auto line_number() const -> std::size_t {
    return line_number_;
  }

private:
  auto next_line() -> std::string;

  std::istream& in_;
  std::size_t line_number_ = 0;
};

} // namespace detail
} // namespace itcm
