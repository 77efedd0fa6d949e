#include "diffgeo/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace diffgeo {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

// Parses one CSV line into doubles; `line_no` is 1-based for diagnostics.
void parse_row(const std::string& line, int line_no,
               std::vector<double>& out) {
  out.clear();
  size_t pos = 0;
  int col = 1;
  while (true) {
    size_t comma = line.find(',', pos);
    std::string field = line.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    // Trim surrounding whitespace.
    size_t b = field.find_first_not_of(" \t\r");
    size_t e = field.find_last_not_of(" \t\r");
    field = b == std::string::npos ? "" : field.substr(b, e - b + 1);
    if (field.empty()) {
      throw Error("CSV parse error at row " + std::to_string(line_no) +
                  ", column " + std::to_string(col) + ": empty field");
    }
    char* end = nullptr;
    double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size()) {
      throw Error("CSV parse error at row " + std::to_string(line_no) +
                  ", column " + std::to_string(col) + ": '" + field +
                  "' is not a number");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
    ++col;
  }
}

}  // namespace

PointCloud read_csv(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  Index d = -1;
  bool skipped_header = !header;
  while (std::getline(in, line)) {
    ++line_no;
    // Skip blank lines.
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> row;
    parse_row(line, line_no, row);
    if (d < 0) {
      d = static_cast<Index>(row.size());
    } else if (static_cast<Index>(row.size()) != d) {
      throw Error("CSV parse error at row " + std::to_string(line_no) +
                  ": expected " + std::to_string(d) + " columns, found " +
                  std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  PointCloud cloud;
  cloud.points.resize(static_cast<Index>(rows.size()), std::max<Index>(d, 0));
  for (Index i = 0; i < cloud.points.rows(); ++i) {
    for (Index j = 0; j < cloud.points.cols(); ++j) {
      cloud.points(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }
  return cloud;
}

void write_csv(const std::string& path, const MatX& m,
               const std::vector<std::string>& col_names) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  if (!col_names.empty()) {
    for (size_t j = 0; j < col_names.size(); ++j) {
      if (j) out << ',';
      out << col_names[j];
    }
    out << '\n';
  }
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

PointCloud read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  uint32_t n = 0, d = 0;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&d), 4);
  if (!in) throw Error("binary read error: truncated header in " + path);
  PointCloud cloud;
  cloud.points.resize(n, d);
  // Column-major payload.
  std::vector<double> col(n);
  for (uint32_t j = 0; j < d; ++j) {
    in.read(reinterpret_cast<char*>(col.data()),
            static_cast<std::streamsize>(sizeof(double) * n));
    if (!in) {
      throw Error("binary read error: truncated column " + std::to_string(j) +
                  " in " + path);
    }
    for (uint32_t i = 0; i < n; ++i) cloud.points(i, j) = col[i];
  }
  return cloud;
}

void write_binary(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open file for writing: " + path);
  uint32_t n = static_cast<uint32_t>(cloud.size());
  uint32_t d = static_cast<uint32_t>(cloud.dim());
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  std::vector<double> col(n);
  for (uint32_t j = 0; j < d; ++j) {
    for (uint32_t i = 0; i < n; ++i) col[i] = cloud.points(i, j);
    out.write(reinterpret_cast<const char*>(col.data()),
              static_cast<std::streamsize>(sizeof(double) * n));
  }
  if (!out) throw Error("write failed: " + path);
}

}  // namespace diffgeo
