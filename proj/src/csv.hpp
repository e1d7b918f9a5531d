#pragma once

// Minimal comma-separated reader shared by the loaders. No quoting support:
// none of the file formats carry embedded commas.

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace doi::csv {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

/// Reads the next non-blank line; false at end of input.
inline bool next_row(std::istream& in, std::vector<std::string>& row, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    row = split(line);
    return true;
  }
  return false;
}

inline double to_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
  }
}

inline long long to_int(const std::string& s, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": not an integer: '" + s + "'");
  }
}

}  // namespace doi::csv
