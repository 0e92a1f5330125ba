#include "rgmm/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "rgmm/errors.hpp"

namespace rgmm {

namespace {

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

Eigen::MatrixXd read_matrix(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw ConfigError("matrix: missing 'rows cols' header");
  std::istringstream header(line);
  long rows = -1, cols = -1;
  std::string extra;
  if (!(header >> rows >> cols) || (header >> extra) || rows < 0 || cols < 0)
    throw ConfigError("matrix: malformed header '" + line + "'");
  Eigen::MatrixXd a(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!next_content_line(in, line))
      throw ConfigError("matrix: expected " + std::to_string(rows) + " rows, got " +
                        std::to_string(i));
    std::istringstream row(line);
    for (long j = 0; j < cols; ++j) {
      if (!(row >> a(i, j)))
        throw ConfigError("matrix: row " + std::to_string(i + 1) + " has fewer than " +
                          std::to_string(cols) + " values");
    }
    if (row >> extra)
      throw ConfigError("matrix: row " + std::to_string(i + 1) + " has extra values");
  }
  return a;
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file '" + path + "'");
  try {
    return read_matrix(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& a) {
  out << a.rows() << ' ' << a.cols() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out << (j ? " " : "") << a(i, j);
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const Eigen::MatrixXd& a) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write matrix file '" + path + "'");
  write_matrix(out, a);
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace rgmm
