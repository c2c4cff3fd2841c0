// SPDX-License-Identifier: Apache-2.0

#include "itcm/number_text.hpp"

#include <array>
#include <charconv>

namespace itcm {

auto format_double(double value) -> std::string {
  auto buffer = std::array<char, 32>{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(),
                                 value);
  return std::string(buffer.data(), end);
}

auto parse_double(std::string_view text) -> std::optional<double> {
  if (text.empty())
    return std::nullopt;
  auto value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc{} || end != text.data() + text.size())
    return std::nullopt;
  return value;
}

} // namespace itcm
