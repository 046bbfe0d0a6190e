#include "thorin/cli/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "thorin/numkit/errors.hpp"

namespace thorin::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

}  // namespace

laguerre::SampleMatrix read_csv(std::istream& in, const std::string& source) {
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool first_row = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line));
    if (first_row) {
      first_row = false;
      bool numeric = true;
      double v = 0.0;
      for (const auto& c : cells) numeric = numeric && parse_number(c, v);
      width = cells.size();
      if (!numeric) continue;
    }
    if (cells.size() != width) {
      throw DataError(source + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " columns, expected " + std::to_string(width));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string where = source + ": line " + std::to_string(line_no) + ", column " + std::to_string(j + 1);
      double v = 0.0;
      if (!parse_number(cells[j], v)) throw DataError(where + ": '" + cells[j] + "' is not a number");
      if (!std::isfinite(v)) throw DataError(where + ": value is not finite");
      if (v < 0.0) throw DataError(where + ": negative value " + cells[j]);
      values.push_back(v);
    }
  }
  if (values.empty()) throw DataError(source + ": no data rows");
  return laguerre::SampleMatrix(width, std::move(values));
}

laguerre::SampleMatrix read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input file '" + path + "'");
  return read_csv(in, path);
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const laguerre::SampleMatrix& s) {
  for (std::size_t j = 0; j < s.dim(); ++j) out << (j ? "," : "") << 'x' << j + 1;
  out << '\n';
  std::string row;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    row.clear();
    for (std::size_t j = 0; j < s.dim(); ++j) {
      if (j) row += ',';
      row += format_double(s(i, j));
    }
    row += '\n';
    out << row;
  }
}

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config JSON: ") + e.what());
    }
    for (const auto& [key, v] : j.items()) {
      if (v.is_array()) {
        std::string list;
        for (const auto& x : v) list += (list.empty() ? "" : ",") + scalar_text(x);
        out.emplace_back(key, list);
      } else if (v.is_object() || v.is_null()) {
        throw ConfigError("config key '" + key + "' must be a scalar or a list");
      } else {
        out.emplace_back(key, scalar_text(v));
      }
    }
    return out;
  }
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

}  // namespace thorin::cli
