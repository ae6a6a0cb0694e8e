#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace varsma {

// Numeric table read from CSV: rows = time points, columns = series.
// Delimiter (comma or tab) and an optional header row are auto-detected;
// a first row with any non-numeric cell is treated as the header.
struct CsvTable {
  std::vector<std::string> header;  // empty if the file had none
  Eigen::MatrixXd values;
  char delimiter = ',';
};

// Throws ValidationError with a line-numbered message on unreadable files,
// non-numeric cells, or ragged rows.
CsvTable read_csv(const std::string& path);

// All floating-point output uses 17 significant digits so files diff cleanly
// and round-trip bit-exactly.
std::string format_g17(double x);

void write_csv(const std::string& path, const Eigen::MatrixXd& values,
               const std::vector<std::string>& header = {}, char delimiter = ',');

}  // namespace varsma
