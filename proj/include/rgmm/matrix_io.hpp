#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace rgmm {

// Plain-text dense matrix format:
//
//   rows cols
//   a11 a12 ... a1n
//   ...
//
// Whitespace-separated, one matrix row per line. Lines starting with '#'
// are ignored. Values are written with 17 significant digits so a write
// followed by a read reproduces the matrix bit for bit.

Eigen::MatrixXd read_matrix(std::istream& in);
Eigen::MatrixXd read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Eigen::MatrixXd& a);
void write_matrix_file(const std::string& path, const Eigen::MatrixXd& a);

}  // namespace rgmm
