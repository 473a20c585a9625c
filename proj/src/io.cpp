#include "lipext/io.hpp"

#include "json.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace lipext {

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  for (;;) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) end = line.size();
    std::size_t a = pos, b = end;
    while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1]))) --b;
    double v = 0.0;
    const char* first = line.data() + a;
    const char* last = line.data() + b;
    if (*first == '+') ++first;
    const auto r = std::from_chars(first, last, v);
    if (a == b || r.ec != std::errc() || r.ptr != last || !std::isfinite(v)) return false;
    out.push_back(v);
    if (end == line.size()) return true;
    pos = end + 1;
  }
}

}  // namespace

Matrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!parse_row(line, row)) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw DataError(path + ":" + std::to_string(lineno) + ": not a numeric CSV row");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                      " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw DataError(path + ": no data rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return m;
}

PointSet read_points(const std::string& path, double p) {
  Matrix m = read_csv(path);
  return PointSet(AmbientSpace(m.cols(), p), m.transpose());
}

ScalarField read_values(const std::string& path, Index expected_rows) {
  const Matrix m = read_csv(path);
  if (m.rows() != expected_rows) {
    throw DataError(path + ": " + std::to_string(m.rows()) + " value rows for " + std::to_string(expected_rows) +
                    " points");
  }
  return ScalarField{m.transpose()};
}

JetFile read_jet_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed JSON: " + e.what());
  }
  try {
    const auto& pts = j.at("points");
    const auto& vals = j.at("values");
    const auto& diffs = j.at("differentials");
    const std::size_t n = pts.size();
    if (n == 0) throw DataError(path + ": no points");
    if (vals.size() != n || diffs.size() != n) throw DataError(path + ": points, values and differentials differ in count");
    const std::size_t d = pts.at(0).size();
    const std::size_t k = vals.at(0).is_array() ? vals.at(0).size() : 1;
    if (d == 0 || k == 0) throw DataError(path + ": empty point or value");
    JetFile out;
    out.points.resize(static_cast<Index>(d), static_cast<Index>(n));
    out.jet.values.resize(static_cast<Index>(k), static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (pts[i].size() != d) throw DataError(path + ": point " + std::to_string(i) + " has the wrong dimension");
      for (std::size_t c = 0; c < d; ++c) out.points(static_cast<Index>(c), static_cast<Index>(i)) = pts[i][c].get<double>();
      if (vals[i].is_array()) {
        if (vals[i].size() != k) throw DataError(path + ": value " + std::to_string(i) + " has the wrong length");
        for (std::size_t r = 0; r < k; ++r) out.jet.values(static_cast<Index>(r), static_cast<Index>(i)) = vals[i][r].get<double>();
      } else {
        if (k != 1) throw DataError(path + ": mixed scalar and vector values");
        out.jet.values(0, static_cast<Index>(i)) = vals[i].get<double>();
      }
      // A k = 1 differential may be given as a flat row.
      const auto& D = diffs[i];
      Matrix L(static_cast<Index>(k), static_cast<Index>(d));
      if (k == 1 && D.size() == d && !D.at(0).is_array()) {
        for (std::size_t c = 0; c < d; ++c) L(0, static_cast<Index>(c)) = D[c].get<double>();
      } else {
        if (D.size() != k) throw DataError(path + ": differential " + std::to_string(i) + " has the wrong shape");
        for (std::size_t r = 0; r < k; ++r) {
          if (D[r].size() != d) throw DataError(path + ": differential " + std::to_string(i) + " has the wrong shape");
          for (std::size_t c = 0; c < d; ++c) L(static_cast<Index>(r), static_cast<Index>(c)) = D[r][c].get<double>();
        }
      }
      out.jet.differentials.push_back(std::move(L));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": invalid jet file: " + e.what());
  }
}

std::string jet_to_json(const Matrix& points, const Jet& jet) {
  nlohmann::json pts = nlohmann::json::array(), vals = nlohmann::json::array(), diffs = nlohmann::json::array();
  for (Index i = 0; i < points.cols(); ++i) {
    const Vector x = points.col(i);
    pts.push_back(std::vector<double>(x.begin(), x.end()));
    const Vector v = jet.values.col(i);
    vals.push_back(std::vector<double>(v.begin(), v.end()));
    nlohmann::json L = nlohmann::json::array();
    const Matrix& D = jet.differentials[static_cast<std::size_t>(i)];
    for (Index r = 0; r < D.rows(); ++r) {
      const Vector row = D.row(r).transpose();
      L.push_back(std::vector<double>(row.begin(), row.end()));
    }
    diffs.push_back(L);
  }
  return nlohmann::json{{"points", pts}, {"values", vals}, {"differentials", diffs}}.dump();
}

void write_csv_row(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) out << ',';
    out << format_double(row[k]);
  }
  out << '\n';
}

void write_csv_header(std::ostream& out, const std::vector<std::string>& names) {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (k) out << ',';
    out << names[k];
  }
  out << '\n';
}

}  // namespace lipext
