// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace itcm::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_processing = 1;
inline constexpr int exit_usage = 2;

/// Runs the command line `args` (without the program name). Reports go to
/// `out`, diagnostics to `err`. Returns the process exit code.
auto run(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err) -> int;

} // namespace itcm::cli
