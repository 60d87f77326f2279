#include "twinzyg/matrix_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twinzyg::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error("matrix file '" + path + "': " + what);
}

}  // namespace

Eigen::MatrixXd read_matrix_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open for reading");
    std::uint64_t rows = 0, cols = 0;
    if (!(in >> rows >> cols)) fail(path, "malformed header, expected 'rows cols'");
    if (rows == 0 || cols == 0) fail(path, "zero-sized matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint64_t r = 0; r < rows; ++r)
        for (std::uint64_t c = 0; c < cols; ++c)
            if (!(in >> m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))))
                fail(path, "truncated data at row " + std::to_string(r));
    return m;
}

void write_matrix_text(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) fail(path, "cannot open for writing");
    out << m.rows() << ' ' << m.cols() << '\n';
    out.precision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << m(r, c);
        }
        out << '\n';
    }
    if (!out) fail(path, "write error");
}

Eigen::MatrixXd read_matrix_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    std::uint64_t header[2];
    if (!in.read(reinterpret_cast<char*>(header), sizeof header))
        fail(path, "truncated binary header");
    const std::uint64_t rows = header[0], cols = header[1];
    if (rows == 0 || cols == 0) fail(path, "zero-sized matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    // stored row-major; Eigen matrices are column-major
    std::vector<double> row(cols);
    for (std::uint64_t r = 0; r < rows; ++r) {
        if (!in.read(reinterpret_cast<char*>(row.data()),
                     static_cast<std::streamsize>(cols * sizeof(double))))
            fail(path, "truncated binary data at row " + std::to_string(r));
        for (std::uint64_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    return m;
}

void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    const std::uint64_t header[2] = {static_cast<std::uint64_t>(m.rows()),
                                     static_cast<std::uint64_t>(m.cols())};
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) fail(path, "write error");
}

namespace {
bool has_bin_extension(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
}
}  // namespace

Eigen::MatrixXd read_matrix(const std::string& path) {
    return has_bin_extension(path) ? read_matrix_binary(path) : read_matrix_text(path);
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
    if (has_bin_extension(path))
        write_matrix_binary(path, m);
    else
        write_matrix_text(path, m);
}

}  // namespace twinzyg::io
