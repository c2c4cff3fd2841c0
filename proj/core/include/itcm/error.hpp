// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

namespace itcm {

/// A file could not be opened, created or written.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace itcm
