#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace invobs {

/// Tabular simulation output: a header naming basis-indexed columns and
/// rows of doubles. Written with 17 significant digits so reading a file back
/// reproduces every value exactly.
struct SimRecord {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws ParseError when absent.
  size_t column(const std::string& name) const;
};

void write_csv(std::ostream& os, const SimRecord& rec);
/// Throws ParseError (with line number) on ragged or non-numeric rows.
SimRecord read_csv(std::istream& is);

/// printf("%.17g")
std::string format_double(double v);

}  // namespace invobs
