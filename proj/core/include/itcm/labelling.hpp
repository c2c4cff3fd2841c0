// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "itcm/flow.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace itcm {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Well-known server port to application label.
class PortMap {
public:
  /// 80 www-http, 443 https, 20/21 ftp, 53 domain.
  static auto defaults() -> PortMap;

  /// Adds `port,label` lines from `in` on top of the current entries. Blank
  /// lines and `#` comments are ignored. Throws ConfigError naming the line.
  void merge(std::istream& in, const std::string& source = "port map");
  void merge_file(const std::filesystem::path& path);

  void set(std::uint16_t port, std::string label);
  auto find(std::uint16_t port) const -> const std::string*;

  auto entries() const -> const std::map<std::uint16_t, std::string>& {
    return entries_;
  }

private:
  std::map<std::uint16_t, std::string> entries_;
};

/// Label from the responder's port, falling back to the initiator's port.
auto label_flow(const FlowRecord& flow, const PortMap& map)
  -> std::optional<std::string>;

} // namespace itcm
