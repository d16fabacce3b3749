#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lipcover/geometry.hpp"
#include "lipcover/problem.hpp"

namespace lipcover {

/// Writes content to path atomically (temp file in the same directory, then
/// rename), so readers never observe a partial file.
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace detail {

inline std::string format_double(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_point(const Point& p) {
  std::string s;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k) s += ';';
    s += format_double(p[k]);
  }
  return s;
}

/// RFC-4180 quoting: wrap in quotes when the field contains a comma, quote,
/// or newline; embedded quotes are doubled.
inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline double parse_double(const std::string& s) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  return std::stod(s);
}

inline Point parse_point(const std::string& s) {
  Point p;
  if (s.empty()) return p;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ';')) p.push_back(parse_double(tok));
  return p;
}

/// Splits one CSV record honoring RFC-4180 quotes.
inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

inline constexpr const char* kTraceCsvHeader =
    "iter,query,relax_point,j_at_query,h_at_query,feasible,within_delta,"
    "delta_global,surrogate_lb,subsolver_nodes,wall_ms,projection_clamped";

inline std::string trace_to_csv(const std::vector<IterationTrace>& trace) {
  std::string out = kTraceCsvHeader;
  out += '\n';
  for (const IterationTrace& row : trace) {
    out += std::to_string(row.iter);
    out += ',';
    out += detail::csv_quote(detail::format_point(row.query));
    out += ',';
    if (row.relax_point)
      out += detail::csv_quote(detail::format_point(*row.relax_point));
    out += ',';
    out += detail::format_double(row.j_at_query);
    out += ',';
    out += detail::format_double(row.h_at_query);
    out += ',';
    out += row.feasible_flag ? '1' : '0';
    out += ',';
    out += row.within_delta_flag ? '1' : '0';
    out += ',';
    out += detail::format_double(row.delta_global);
    out += ',';
    out += detail::format_double(row.surrogate_lb);
    out += ',';
    out += std::to_string(row.subsolver_nodes);
    out += ',';
    out += std::to_string(row.wall_ms);
    out += ',';
    out += row.projection_clamped ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline void write_trace_csv(const std::filesystem::path& path,
                            const std::vector<IterationTrace>& trace) {
  atomic_write(path, trace_to_csv(trace));
}

inline std::vector<IterationTrace> trace_from_csv(const std::string& content) {
  std::vector<IterationTrace> trace;
  std::stringstream ss(content);
  std::string line;
  if (!std::getline(ss, line)) return trace;
  if (line != kTraceCsvHeader)
    throw std::runtime_error("trace_from_csv: unexpected header: " + line);
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != 12)
      throw std::runtime_error("trace_from_csv: expected 12 fields");
    IterationTrace row;
    row.iter = std::stoll(f[0]);
    row.query = detail::parse_point(f[1]);
    if (!f[2].empty()) row.relax_point = detail::parse_point(f[2]);
    row.j_at_query = detail::parse_double(f[3]);
    row.h_at_query = detail::parse_double(f[4]);
    row.feasible_flag = f[5] == "1";
    row.within_delta_flag = f[6] == "1";
    row.delta_global = detail::parse_double(f[7]);
    row.surrogate_lb = detail::parse_double(f[8]);
    row.subsolver_nodes = std::stoll(f[9]);
    row.wall_ms = std::stoll(f[10]);
    row.projection_clamped = f[11] == "1";
    trace.push_back(std::move(row));
  }
  return trace;
}

inline std::vector<IterationTrace> read_trace_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_trace_csv: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return trace_from_csv(buf.str());
}

}  // namespace lipcover
