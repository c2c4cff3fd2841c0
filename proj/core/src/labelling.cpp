// SPDX-License-Identifier: Apache-2.0

#include "itcm/labelling.hpp"

#include "itcm/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>

namespace itcm {

namespace {

auto trim(std::string_view s) -> std::string_view {
  auto ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

} // namespace

auto PortMap::defaults() -> PortMap {
  auto map = PortMap{};
  map.set(80, "www-http");
  map.set(443, "https");
  map.set(20, "ftp");
  map.set(21, "ftp");
  map.set(53, "domain");
  return map;
}

void PortMap::set(std::uint16_t port, std::string label) {
  if (label.empty())
    throw ConfigError{"port " + std::to_string(port) + ": empty label"};
  if (label.find_first_of(",\n\r") != std::string::npos)
    throw ConfigError{"port " + std::to_string(port)
                      + ": label must not contain commas or line breaks"};
  entries_[port] = std::move(label);
}

auto PortMap::find(std::uint16_t port) const -> const std::string* {
  auto it = entries_.find(port);
  return it == entries_.end() ? nullptr : &it->second;
}

void PortMap::merge(std::istream& in, const std::string& source) {
  auto line = std::string{};
  auto number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto text = trim(line);
    if (text.empty() || text.front() == '#')
      continue;
    auto where = source + ":" + std::to_string(number) + ": ";
    auto comma = text.find(',');
    if (comma == std::string_view::npos)
      throw ConfigError{where + "expected 'port,label'"};
    auto port_text = trim(text.substr(0, comma));
    auto label = trim(text.substr(comma + 1));
    auto port = unsigned{};
    auto [end, ec] = std::from_chars(port_text.data(),
                                     port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || end != port_text.data() + port_text.size()
        || port > 65535)
      throw ConfigError{where + "invalid port '" + std::string{port_text}
                        + "'"};
    if (label.empty())
      throw ConfigError{where + "empty label"};
    if (label.find(',') != std::string_view::npos)
      throw ConfigError{where + "label must not contain commas"};
    entries_[static_cast<std::uint16_t>(port)] = std::string{label};
  }
}

void PortMap::merge_file(const std::filesystem::path& path) {
  auto in = std::ifstream{path};
  if (!in)
    throw IoError{path.string() + ": cannot open port map"};
  merge(in, path.string());
}

auto label_flow(const FlowRecord& flow, const PortMap& map)
  -> std::optional<std::string> {
  if (const auto* label = map.find(flow.responder.port))
    return *label;
  if (const auto* label = map.find(flow.initiator.port))
    return *label;
  return std::nullopt;
}

} // namespace itcm
