#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace adq {

// 17 significant digits: every double round-trips.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

// Writes to a sibling temp file and renames it over the target.
void write_file_atomic(const std::string& path, const std::string& content);

// FNV-1a, used for config fingerprints.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace adq
