#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace dx {

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

// Trimmed, ASCII-lowercased form used for case-insensitive label matching.
std::string normalize_key(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

// Case-insensitive (ASCII) ordering with a raw-byte tiebreak so the order is
// total.
bool less_case_insensitive(std::string_view a, std::string_view b);

// Reads a text file line by line, stripping a trailing '\r' and tracking the
// 1-based line number for error messages.
class LineReader {
 public:
  explicit LineReader(const std::string& path);

  bool next(std::string& line);
  std::size_t line_number() const { return line_no_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

// Reads one entry per line, skipping blank lines and '#' comments.
std::vector<std::string> read_list_file(const std::string& path);

void write_text_file(const std::string& path, std::string_view contents);

}  // namespace dx
