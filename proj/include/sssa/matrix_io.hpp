#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sssa/errors.hpp"

namespace sssa {

// Formats a double with 17 significant digits, enough to round-trip.
inline std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

// Plain-text CSV, one matrix row per line, no header.
inline void write_matrix_csv(const std::filesystem::path& path,
                             const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) {
        out << ',';
      }
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

inline Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError("bad number '" + cell + "' in " + path.string());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError("ragged rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw IoError("empty matrix file " + path.string());
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

// Plain (P2) PGM with the matrix mapped affinely from [min, max] onto
// [0, 255]; a constant matrix maps to all-zero pixels. The min/max used for
// the mapping land in a sidecar `.meta.json` written by the caller.
inline void write_matrix_pgm(const std::filesystem::path& path,
                             const Eigen::MatrixXd& m, double lo, double hi) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << "P2\n" << m.cols() << ' ' << m.rows() << "\n255\n";
  const double span = hi - lo;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      long pixel = 0;
      if (span > 0.0) {
        pixel = std::lround(255.0 * (m(i, j) - lo) / span);
        pixel = std::clamp(pixel, 0L, 255L);
      }
      if (j > 0) {
        out << ' ';
      }
      out << pixel;
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

// Reads a plain P2 PGM back into a matrix of pixel values.
inline Eigen::MatrixXd read_matrix_pgm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string magic;
  in >> magic;
  if (magic != "P2") {
    throw IoError(path.string() + " is not a plain PGM");
  }
  Eigen::Index cols = 0, rows = 0;
  int maxval = 0;
  in >> cols >> rows >> maxval;
  if (!in || cols <= 0 || rows <= 0) {
    throw IoError("bad PGM header in " + path.string());
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      int pixel = 0;
      if (!(in >> pixel)) {
        throw IoError("truncated PGM " + path.string());
      }
      m(i, j) = pixel;
    }
  }
  return m;
}

}  // namespace sssa
