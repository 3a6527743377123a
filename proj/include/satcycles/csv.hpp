#pragma once

// Minimal CSV with '#'-prefixed comment lines, one header line and rows of
// text fields. Fields are kept as text so a parse/emit cycle is lossless.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "satcycles/error.hpp"

namespace satcycles {

struct CsvTable {
  std::vector<std::string> comments;  // text after the leading '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string format_real(double v, int digits = 15) {
  if (v == 0.0) v = 0.0;  // no "-0" in output
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

namespace detail {

inline std::string quote_field(const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline void emit_record(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += quote_field(fields[i]);
  }
  out += '\n';
}

}  // namespace detail

inline std::string to_csv(const CsvTable& t) {
  std::string out;
  for (const auto& c : t.comments) out += "#" + c + "\n";
  detail::emit_record(out, t.header);
  for (const auto& r : t.rows) detail::emit_record(out, r);
  return out;
}

inline CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!have_header && !line.empty() && line.front() == '#') {
      t.comments.emplace_back(line.substr(1));
    } else if (!have_header) {
      t.header = detail::split_record(line);
      have_header = true;
    } else {
      t.rows.push_back(detail::split_record(line));
    }
  }
  return t;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io_failure, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error(ErrorCode::io_failure, "write failed for " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io_failure, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace satcycles
