#ifndef LIPEXT_IO_HPP
#define LIPEXT_IO_HPP

#include "lipext/extension.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lipext {

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

/// Numeric CSV, one row per record. A first line that does not parse as numbers is taken as a header.
/// Throws DataError on a missing file, ragged rows, or non-numeric cells (message names the line).
Matrix read_csv(const std::string& path);

/// Points are rows of the CSV; the result stores them as columns.
PointSet read_points(const std::string& path, double p);

/// Values CSV aligned by row with the points: k columns.
ScalarField read_values(const std::string& path, Index expected_rows);

/// {"points":[[...]],"values":[[...]],"differentials":[[[...]]]}; values may be scalars for k = 1.
struct JetFile {
  Matrix points;  // d × N
  Jet jet;
};
JetFile read_jet_json(const std::string& path);
std::string jet_to_json(const Matrix& points, const Jet& jet);

void write_csv_row(std::ostream& out, const std::vector<double>& row);
void write_csv_header(std::ostream& out, const std::vector<std::string>& names);

}  // namespace lipext

#endif  // LIPEXT_IO_HPP
