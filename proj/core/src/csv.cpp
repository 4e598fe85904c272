#include "corrvote/csv.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace corrvote {

std::string format_double(double v) {
  // %.17g always round-trips; try shorter forms first for readable files.
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

double parse_double(const std::string& token, const std::string& context) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::runtime_error(context + ": invalid number '" + token + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& token, const std::string& context) {
  std::int64_t v = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw std::runtime_error(context + ": invalid integer '" + token + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

CsvReader::CsvReader(const std::string& path, const std::string& expected_header)
    : in_(path), path_(path) {
  if (!in_) {
    throw std::runtime_error("cannot open CSV file: " + path);
  }
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line != expected_header) {
      throw std::runtime_error(path + ":" + std::to_string(line_no_) +
                               ": unexpected CSV header '" + line + "', expected '" +
                               expected_header + "'");
    }
    return;
  }
  throw std::runtime_error(path + ": CSV file has no header row");
}

bool CsvReader::next_row(std::vector<std::string>& fields) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    fields = split_csv_line(line);
    return true;
  }
  return false;
}

}  // namespace corrvote
