#pragma once

#include <Eigen/Dense>
#include <string>

namespace twinzyg::io {

// Plain matrix text format: header line "rows cols", then row-major
// whitespace-separated decimals. Values are written with 17 significant
// digits so the round trip is exact.
Eigen::MatrixXd read_matrix_text(const std::string& path);
void write_matrix_text(const std::string& path, const Eigen::MatrixXd& m);

// Binary variant: 16-byte header (two little-endian uint64 counts: rows,
// cols) followed by row-major little-endian IEEE 754 doubles.
Eigen::MatrixXd read_matrix_binary(const std::string& path);
void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m);

// Dispatch on extension: ".bin" selects the binary variant.
Eigen::MatrixXd read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace twinzyg::io
