#include "forage/csv.hpp"

#include <cmath>
#include <fstream>

#include "forage/common.hpp"

namespace forage::csv {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::string buf;
  if (size > 0) {
    buf.resize(static_cast<std::size_t>(size));
    in.read(buf.data(), size);
  }
  return buf;
}

bool LineReader::next(std::string_view& line) {
  if (pos_ >= buf_.size()) return false;
  auto end = buf_.find('\n', pos_);
  if (end == std::string_view::npos) end = buf_.size();
  line = buf_.substr(pos_, end - pos_);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  pos_ = end + 1;
  ++line_no_;
  return true;
}

std::span<const std::string_view> Splitter::split(std::string_view line) {
  fields_.clear();
  if (line.find('"') == std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        fields_.push_back(line.substr(start));
        break;
      }
      fields_.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    return fields_;
  }

  // Quoted path: unescape into scratch_, remember offsets, then build views.
  scratch_.clear();
  scratch_.reserve(line.size());
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t field_start = 0;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          scratch_.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        scratch_.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      spans.emplace_back(field_start, scratch_.size() - field_start);
      field_start = scratch_.size();
    } else {
      scratch_.push_back(c);
    }
  }
  spans.emplace_back(field_start, scratch_.size() - field_start);
  const std::string_view base(scratch_);
  for (auto [off, len] : spans) fields_.push_back(base.substr(off, len));
  return fields_;
}

Header::Header(std::span<const std::string_view> names) {
  names_.reserve(names.size());
  for (auto n : names) names_.emplace_back(trim(n));
}

std::optional<std::size_t> Header::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return false;
  out = v;
  return true;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return false;
  out = v;
  return true;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace forage::csv
