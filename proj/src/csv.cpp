#include "invobs/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "invobs/errors.hpp"

namespace invobs {

size_t SimRecord::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ParseError("no column named '" + name + "'");
}

std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<size_t>(n));
}

void write_csv(std::ostream& os, const SimRecord& rec) {
  for (size_t i = 0; i < rec.header.size(); ++i) {
    if (i) os << ',';
    os << rec.header[i];
  }
  os << '\n';
  for (const auto& row : rec.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << format_double(row[i]);
    }
    os << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, int line) {
  // strtod handles nan/inf spellings produced by %.17g
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size()) {
    throw ParseError("not a number: '" + cell + "'", line);
  }
  return v;
}

}  // namespace

SimRecord read_csv(std::istream& is) {
  SimRecord rec;
  std::string line;
  int lineno = 0;
  if (!std::getline(is, line)) throw ParseError("empty CSV input");
  ++lineno;
  rec.header = split(line);
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != rec.header.size()) {
      throw ParseError("row has " + std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(rec.header.size()),
                       lineno);
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, lineno));
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

}  // namespace invobs
