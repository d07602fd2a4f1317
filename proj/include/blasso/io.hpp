#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "blasso/errors.hpp"

namespace blasso::io {

/// Fixed 17-significant-digit rendering used for all CSV/JSON data columns;
/// round-trips doubles exactly and is byte-stable across runs.
inline std::string format_g17(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

inline std::string format_f4(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.4f", value);
    return buffer;
}

inline double parse_double(const std::string& token, const std::string& where) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0'))
        throw IoError(where + ": cannot parse number from '" + token + "'");
    return value;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

/// Comma-separated values, one matrix row per line.
inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open matrix file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(file, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<double> row;
        for (const std::string& token : split(line, ','))
            row.push_back(parse_double(token, path));
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError(path + ": ragged rows in matrix file");
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty()) throw IoError(path + ": empty matrix file");
    Eigen::MatrixXd matrix(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return matrix;
}

/// One value per line.
inline Eigen::VectorXd read_vector_lines(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open vector file '" + path + "'");
    std::vector<double> values;
    std::string line;
    while (std::getline(file, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        values.push_back(parse_double(line, path));
    }
    if (values.empty()) throw IoError(path + ": empty vector file");
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

/// "1,0.5,-2" -> vector; used for inline --s / --x flags.
inline Eigen::VectorXd parse_vector_csv(const std::string& text) {
    std::vector<double> values;
    for (const std::string& token : split(text, ','))
        values.push_back(parse_double(token, "inline vector"));
    if (values.empty()) throw IoError("inline vector: empty");
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : data) {
        hash ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

/// Audit hash of a matrix: dimensions plus every entry at full precision.
inline std::string matrix_hash_hex(const Eigen::MatrixXd& matrix) {
    std::string canonical = std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols());
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < matrix.cols(); ++j)
            canonical += ";" + format_g17(matrix(i, j));
    char buffer[24];
    std::snprintf(buffer, sizeof(buffer), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical)));
    return buffer;
}

}  // namespace blasso::io
