#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace corrvote {

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

// Strict double/integer parsing (whole token must be consumed).
double parse_double(const std::string& token, const std::string& context);
std::int64_t parse_int(const std::string& token, const std::string& context);

std::vector<std::string> split_csv_line(const std::string& line);

// Reader that skips '#' comment lines and validates the column header.
// Line numbers reported in errors count every physical line.
class CsvReader {
 public:
  CsvReader(const std::string& path, const std::string& expected_header);

  // False at end of file; otherwise fills `fields` from the next data row.
  bool next_row(std::vector<std::string>& fields);

  std::size_t line_number() const { return line_no_; }
  const std::string& path() const { return path_; }

 private:
  std::ifstream in_;
  std::string path_;
  std::size_t line_no_ = 0;
};

}  // namespace corrvote
