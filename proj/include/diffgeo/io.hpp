#pragma once

// Point-cloud and matrix I/O: CSV (one point per row, no header by default)
// and a binary format with an 8-byte header (u32 n, u32 d, little-endian)
// followed by column-major float64 data.

#include <string>
#include <vector>

#include "diffgeo/types.hpp"

namespace diffgeo {

// Reads a CSV file of numeric rows. Throws Error with row/column
// diagnostics on malformed content. An empty file yields a 0 x 0 cloud.
PointCloud read_csv(const std::string& path, bool header = false);

// Writes a matrix as CSV with 17 significant digits per value. When
// col_names is nonempty it is emitted as a header row.
void write_csv(const std::string& path, const MatX& m,
               const std::vector<std::string>& col_names = {});

PointCloud read_binary(const std::string& path);
void write_binary(const std::string& path, const PointCloud& cloud);

// Formats one double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace diffgeo
