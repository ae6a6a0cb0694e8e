#include "varsma/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "varsma/errors.hpp"

namespace varsma {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, delim)) cells.push_back(cell);
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& cell, double* out) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  *out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(strip_cr(line));
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ValidationError("'" + path + "' is empty");

  CsvTable table;
  table.delimiter = lines[0].find('\t') != std::string::npos ? '\t' : ',';

  const std::vector<std::string> first = split(lines[0], table.delimiter);
  const std::size_t k = first.size();
  double value = 0.0;
  bool first_is_numeric = true;
  for (const auto& cell : first) {
    if (!parse_double(cell, &value)) {
      first_is_numeric = false;
      break;
    }
  }
  std::size_t data_start = 0;
  if (!first_is_numeric) {
    table.header = first;
    data_start = 1;
    if (lines.size() == 1) throw ValidationError("'" + path + "' has a header but no data rows");
  }

  const std::size_t rows = lines.size() - data_start;
  table.values.resize(rows, k);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t lineno = data_start + r + 1;
    const std::vector<std::string> cells = split(lines[data_start + r], table.delimiter);
    if (cells.size() != k) {
      throw ValidationError("line " + std::to_string(lineno) + ": expected " + std::to_string(k) +
                            " columns, got " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (!parse_double(cells[c], &value)) {
        throw ValidationError("line " + std::to_string(lineno) + ": cell '" + cells[c] +
                              "' is not numeric");
      }
      table.values(r, c) = value;
    }
  }
  return table;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_csv(const std::string& path, const Eigen::MatrixXd& values,
               const std::vector<std::string>& header, char delimiter) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  if (!header.empty()) {
    if (static_cast<Eigen::Index>(header.size()) != values.cols())
      throw DimensionError("write_csv: header size does not match column count");
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i > 0) out << delimiter;
      out << header[i];
    }
    out << '\n';
  }
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c > 0) out << delimiter;
      out << format_g17(values(r, c));
    }
    out << '\n';
  }
  if (!out) throw ValidationError("error while writing '" + path + "'");
}

}  // namespace varsma
