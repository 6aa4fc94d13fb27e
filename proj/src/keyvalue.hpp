#pragma once

// Flat `key = value` text shared by the pipeline config and synth specs.
// Blank lines and lines starting with '#' are ignored.

#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "reachfit/error.hpp"

namespace reachfit::detail {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<KeyValue> parse_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::ConfigError, "line " + std::to_string(number) + ": expected key = value");
    }
    out.push_back({trim(t.substr(0, eq)), trim(t.substr(eq + 1)), number});
  }
  return out;
}

[[noreturn]] inline void bad_value(const KeyValue& kv, const char* expected) {
  fail(ErrorCode::ConfigError, "line " + std::to_string(kv.line) + ": " + kv.key +
                                   " expects " + expected + ", got '" + kv.value + "'");
}

inline double to_double(const KeyValue& kv) {
  double v = 0.0;
  const char* end = kv.value.data() + kv.value.size();
  auto [ptr, ec] = std::from_chars(kv.value.data(), end, v);
  if (ec != std::errc() || ptr != end) bad_value(kv, "a number");
  return v;
}

inline std::uint64_t to_uint(const KeyValue& kv) {
  std::uint64_t v = 0;
  const char* end = kv.value.data() + kv.value.size();
  auto [ptr, ec] = std::from_chars(kv.value.data(), end, v);
  if (ec != std::errc() || ptr != end) bad_value(kv, "a non-negative integer");
  return v;
}

inline bool to_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1") return true;
  if (kv.value == "false" || kv.value == "0") return false;
  bad_value(kv, "true or false");
}

inline std::vector<double> to_doubles(const KeyValue& kv, std::size_t count) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= kv.value.size()) {
    const auto comma = kv.value.find(',', pos);
    const std::string part =
        trim(kv.value.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    out.push_back(to_double({kv.key, part, kv.line}));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.size() != count) bad_value(kv, "a comma-separated vector");
  return out;
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace reachfit::detail
