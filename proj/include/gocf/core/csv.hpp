#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gocf/core/digest.hpp"

namespace gocf::csv {

// RFC 4180 field quoting: quote when the field holds a comma, quote, CR or LF.
inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Rows end in CRLF as the RFC prescribes.
class Writer {
 public:
  explicit Writer(std::vector<std::string> header) : width_(header.size()) { row(header); rows_ = 0; }

  Writer& row(const std::vector<std::string>& fields) {
    if (fields.size() != width_) throw std::logic_error("csv: row width mismatch");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) text_.push_back(',');
      text_ += quote(fields[i]);
    }
    text_ += "\r\n";
    ++rows_;
    return *this;
  }

  const std::string& str() const noexcept { return text_; }
  std::size_t rows() const noexcept { return rows_; }
  void save(const std::filesystem::path& path) const { write_file(path, text_); }

 private:
  std::size_t width_;
  std::string text_;
  std::size_t rows_ = 0;
};

class Table {
 public:
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }

  std::size_t col(std::string_view name) const {
    auto i = find(name);
    if (!i) throw std::runtime_error("csv: missing column '" + std::string(name) + "'");
    return *i;
  }
};

inline Table parse(std::string_view text) {
  Table t;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    if (t.header.empty()) t.header = std::move(row);
    else t.rows.push_back(std::move(row));
    row.clear();
    any = false;
  };
  // Skip UTF-8 BOM.
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty() || !row.empty()) end_row();
    } else {
      field.push_back(c);
      any = true;
    }
  }
  if (in_quotes) throw std::runtime_error("csv: unterminated quoted field");
  if (any || !field.empty() || !row.empty()) end_row();
  for (const auto& r : t.rows)
    if (r.size() != t.header.size()) throw std::runtime_error("csv: ragged row");
  return t;
}

inline Table load(const std::filesystem::path& path) { return parse(read_file(path)); }

inline double to_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error("csv: not a number: '" + std::string(s) + "'");
  return v;
}

inline long long to_int(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error("csv: not an integer: '" + std::string(s) + "'");
  return v;
}

// Fixed-precision rendering so outputs are byte-stable.
inline std::string fmt(double v, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    // normalise negative zero
    if (!s.empty() && s[0] == '-') s.erase(0, 1);
  }
  return s;
}

}  // namespace gocf::csv
