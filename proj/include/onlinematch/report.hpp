#pragma once

// Flat key-value report records and their CSV / JSON writers. Both writers
// print numbers with 12 significant digits, so the two formats carry the
// same values.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace onlinematch {

using FieldValue = std::variant<std::string, std::int64_t, std::uint64_t, double, bool>;
using Record = std::vector<std::pair<std::string, FieldValue>>;

struct Report {
  Record config;
  std::vector<Record> results;
};

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string format_field(const FieldValue& v) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(std::uint64_t x) const { return std::to_string(x); }
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, v);
}

// One header row; every data row repeats the config columns ahead of the
// result columns. Result rows must share their column set.
inline void write_csv(std::ostream& os, const Report& r) {
  auto header_of = [](const Record& rec, std::string& line) {
    for (const auto& [k, v] : rec) {
      if (!line.empty()) line += ',';
      line += k;
    }
  };
  auto values_of = [](const Record& rec, std::string& line) {
    for (const auto& [k, v] : rec) {
      if (!line.empty()) line += ',';
      line += format_field(v);
    }
  };
  std::string header;
  header_of(r.config, header);
  if (!r.results.empty()) header_of(r.results.front(), header);
  os << header << '\n';
  for (const auto& row : r.results) {
    std::string line;
    values_of(r.config, line);
    values_of(row, line);
    os << line << '\n';
  }
}

inline nlohmann::ordered_json to_json(const Record& rec) {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  for (const auto& [k, v] : rec) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, double>) {
            // Round to the same 12 digits the CSV writer prints.
            obj[k] = std::strtod(format_double(x).c_str(), nullptr);
          } else {
            obj[k] = x;
          }
        },
        v);
  }
  return obj;
}

inline void write_json(std::ostream& os, const Report& r) {
  nlohmann::ordered_json doc;
  doc["config"] = to_json(r.config);
  doc["results"] = nlohmann::ordered_json::array();
  for (const auto& row : r.results) doc["results"].push_back(to_json(row));
  os << doc.dump(2) << '\n';
}

}  // namespace onlinematch
