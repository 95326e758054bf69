#pragma once

// Output records for the command-line front end: newline-delimited JSON and
// CSV with a fixed header, both with 17-significant-digit floats.

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace clentropy::report {

enum class Format { json, csv };
enum class Status { ok, refused, failed };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::refused: return "refused";
    case Status::failed: return "failed";
  }
  return "failed";
}

inline Status parse_status(const std::string& s) {
  if (s == "ok") return Status::ok;
  if (s == "refused") return Status::refused;
  if (s == "failed") return Status::failed;
  throw std::invalid_argument("unknown status '" + s + "'");
}

/// %.17g, which round-trips every finite double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters in number '" + s + "'");
  return v;
}

using Fields = std::vector<std::pair<std::string, std::string>>;

/// One certified value. `params` and `extra` hold preformatted scalars.
struct OutputRecord {
  std::string command;
  Fields params;
  double value_lo = 0.0;
  double value_hi = 0.0;
  int truncation_level = 0;
  double tail_bound = 0.0;
  Status status = Status::ok;
  std::string diagnostic;
  Fields extra;

  friend bool operator==(const OutputRecord&, const OutputRecord&) = default;
};

/// One isomorphism class in a measure table.
struct TableRow {
  std::string partition;
  std::string order;
  std::string aut_order;
  double measure_lo = 0.0;
  double measure_hi = 0.0;

  friend bool operator==(const TableRow& a, const TableRow& b) {
    return a.partition == b.partition && a.order == b.order && a.aut_order == b.aut_order &&
           a.measure_lo == b.measure_lo && a.measure_hi == b.measure_hi;
  }
};

/// Pass/fail summary of one verification suite.
struct SuiteReport {
  std::string suite;
  bool passed = false;
  long checked = 0;
  std::vector<std::string> counterexamples;
  Fields details;
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

// Scalars that already look like JSON numbers are emitted bare.
inline std::string json_scalar(const std::string& s) {
  if (s == "true" || s == "false") return s;
  if (!s.empty() && s.find_first_not_of("0123456789+-.eE") == std::string::npos) {
    try {
      std::size_t used = 0;
      (void)std::stod(s, &used);
      if (used == s.size()) return s;
    } catch (const std::exception&) {
    }
  }
  return json_string(s);
}

inline std::string json_object(const Fields& f) {
  std::string out = "{";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ',';
    out += json_string(f[i].first) + ':' + json_scalar(f[i].second);
  }
  return out + "}";
}

inline std::string json_number(double x) {
  return std::isfinite(x) ? format_double(x) : json_string(format_double(x));
}

}  // namespace detail

inline std::string to_json(const OutputRecord& r) {
  std::string out = "{\"command\":" + detail::json_string(r.command);
  out += ",\"params\":" + detail::json_object(r.params);
  out += ",\"value_lo\":" + detail::json_number(r.value_lo);
  out += ",\"value_hi\":" + detail::json_number(r.value_hi);
  out += ",\"truncation_level\":" + std::to_string(r.truncation_level);
  out += ",\"tail_bound\":" + detail::json_number(r.tail_bound);
  out += ",\"status\":" + detail::json_string(to_string(r.status));
  if (!r.diagnostic.empty()) out += ",\"diagnostic\":" + detail::json_string(r.diagnostic);
  for (const auto& [k, v] : r.extra) out += "," + detail::json_string(k) + ":" + detail::json_scalar(v);
  return out + "}";
}

inline std::string to_json(const TableRow& r) {
  return "{\"partition\":" + detail::json_string(r.partition) + ",\"order\":" + r.order +
         ",\"aut_order\":" + r.aut_order + ",\"measure_lo\":" + detail::json_number(r.measure_lo) +
         ",\"measure_hi\":" + detail::json_number(r.measure_hi) + "}";
}

inline std::string to_json(const SuiteReport& r) {
  std::string out = "{\"command\":\"verify\",\"suite\":" + detail::json_string(r.suite);
  out += ",\"status\":" + detail::json_string(r.passed ? "pass" : "fail");
  out += ",\"checked\":" + std::to_string(r.checked);
  out += ",\"counterexamples\":[";
  for (std::size_t i = 0; i < r.counterexamples.size(); ++i) {
    if (i) out += ',';
    out += detail::json_string(r.counterexamples[i]);
  }
  out += "],\"details\":" + detail::json_object(r.details);
  return out + "}";
}

// ---------------------------------------------------------------------------
// CSV (RFC 4180 quoting)

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out;
}

/// Splits one CSV record. Quoted fields may contain separators and doubled quotes.
inline std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> out;
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
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
  out.push_back(std::move(cur));
  return out;
}

inline std::string join_fields(const Fields& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ';';
    out += f[i].first + '=' + f[i].second;
  }
  return out;
}

inline Fields split_fields(const std::string& s) {
  Fields out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(';', start);
    if (end == std::string::npos) end = s.size();
    const std::string item = s.substr(start, end - start);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed key=value '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    start = end + 1;
  }
  return out;
}

inline const std::vector<std::string>& record_header() {
  static const std::vector<std::string> h = {"command",  "params",     "value_lo",   "value_hi", "truncation_level",
                                             "tail_bound", "status", "diagnostic", "extra"};
  return h;
}

inline const std::vector<std::string>& table_header() {
  static const std::vector<std::string> h = {"partition", "order", "aut_order", "measure_lo", "measure_hi"};
  return h;
}

inline const std::vector<std::string>& suite_header() {
  static const std::vector<std::string> h = {"suite", "status", "checked", "counterexamples", "details"};
  return h;
}

inline std::string to_csv(const OutputRecord& r) {
  return csv_line({r.command, join_fields(r.params), format_double(r.value_lo), format_double(r.value_hi),
                   std::to_string(r.truncation_level), format_double(r.tail_bound), to_string(r.status),
                   r.diagnostic, join_fields(r.extra)});
}

inline std::string to_csv(const TableRow& r) {
  return csv_line({r.partition, r.order, r.aut_order, format_double(r.measure_lo), format_double(r.measure_hi)});
}

inline std::string to_csv(const SuiteReport& r) {
  std::string examples;
  for (std::size_t i = 0; i < r.counterexamples.size(); ++i) {
    if (i) examples += ';';
    examples += r.counterexamples[i];
  }
  return csv_line({r.suite, r.passed ? "pass" : "fail", std::to_string(r.checked), examples, join_fields(r.details)});
}

inline OutputRecord record_from_csv(const std::string& line) {
  const auto f = parse_csv_line(line);
  if (f.size() != record_header().size()) throw std::invalid_argument("wrong number of CSV fields");
  OutputRecord r;
  r.command = f[0];
  r.params = split_fields(f[1]);
  r.value_lo = parse_double(f[2]);
  r.value_hi = parse_double(f[3]);
  r.truncation_level = std::stoi(f[4]);
  r.tail_bound = parse_double(f[5]);
  r.status = parse_status(f[6]);
  r.diagnostic = f[7];
  r.extra = split_fields(f[8]);
  return r;
}

inline TableRow table_row_from_csv(const std::string& line) {
  const auto f = parse_csv_line(line);
  if (f.size() != table_header().size()) throw std::invalid_argument("wrong number of CSV fields");
  return {f[0], f[1], f[2], parse_double(f[3]), parse_double(f[4])};
}

}  // namespace clentropy::report
