#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace strap {

// Key-value sidecar describing one embedding run: config, input, recorded
// (n, m), per-stage wall-clock, output paths. Plain "key\tvalue" lines.
struct RunManifest {
  std::map<std::string, std::string> entries;

  void set(const std::string& key, const std::string& value) { entries[key] = value; }

  const std::string& at(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw std::out_of_range("RunManifest: missing key " + key);
    return it->second;
  }

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : entries) out << k << '\t' << v << '\n';
  }

  static RunManifest parse(std::istream& in) {
    RunManifest m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw std::runtime_error("RunManifest: malformed line " + std::to_string(line_no));
      }
      m.entries[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return m;
  }
};

}  // namespace strap
