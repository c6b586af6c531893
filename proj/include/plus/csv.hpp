#pragma once
// Minimal CSV plumbing shared by the table readers and writers.

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace plus::io {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& field, int line_no, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    while (pos < field.size() && (field[pos] == ' ' || field[pos] == '\t')) ++pos;
    if (pos != field.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string(what) + ": line " + std::to_string(line_no) +
                             ": cannot parse '" + field + "' as a number");
  }
}

inline std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string(what) + ": cannot open '" + path + "'");
  return in;
}

inline std::ofstream open_output(const std::string& path, const char* what) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(std::string(what) + ": cannot write '" + path + "'");
  return out;
}

// Fixed formatting keeps batch outputs byte-stable across runs.
inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace plus::io
