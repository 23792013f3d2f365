#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forage::csv {

/// Reads a whole file into memory. Throws InputError naming the path if it
/// cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Iterates lines of an in-memory buffer, stripping a trailing '\r'.
class LineReader {
 public:
  explicit LineReader(std::string_view buf) : buf_(buf) {}

  bool next(std::string_view& line);
  std::size_t line_number() const { return line_no_; }

 private:
  std::string_view buf_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

/// Splits one CSV record. Unquoted lines are split in place; lines with
/// double quotes are unescaped into an internal buffer. The returned span is
/// valid until the next call.
class Splitter {
 public:
  std::span<const std::string_view> split(std::string_view line);

 private:
  std::vector<std::string_view> fields_;
  std::string scratch_;
};

/// Maps header names to column positions.
class Header {
 public:
  explicit Header(std::span<const std::string_view> names);

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

std::string_view trim(std::string_view s);

bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, std::int64_t& out);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

}  // namespace forage::csv
