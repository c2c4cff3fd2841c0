// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace itcm {

/// Shortest decimal text that parses back to exactly `value`.
auto format_double(double value) -> std::string;

/// Parses the whole of `text` as a double; nothing on any trailing garbage.
auto parse_double(std::string_view text) -> std::optional<double>;

} // namespace itcm
