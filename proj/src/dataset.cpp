#include "fusedhs/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fusedhs/errors.hpp"

namespace fusedhs {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

void Dataset::validate() const {
  if (X.rows() < 2) throw DataError("dataset needs at least 2 rows");
  if (X.cols() < 1) throw DataError("dataset needs at least 1 predictor");
  if (y.size() != X.rows()) throw DataError("response length does not match design rows");
  if (!y.allFinite() || !X.allFinite()) throw DataError("dataset contains non-finite values");
  if (!column_names.empty() && column_names.size() != p()) {
    throw DataError("column name count does not match design columns");
  }
}

Dataset Dataset::without_row(std::size_t i) const {
  const auto n = X.rows();
  const auto r = static_cast<Eigen::Index>(i);
  Dataset out;
  out.column_names = column_names;
  out.provenance = provenance;
  out.X.resize(n - 1, X.cols());
  out.y.resize(n - 1);
  out.X.topRows(r) = X.topRows(r);
  out.X.bottomRows(n - r - 1) = X.bottomRows(n - r - 1);
  out.y.head(r) = y.head(r);
  out.y.tail(n - r - 1) = y.tail(n - r - 1);
  return out;
}

Vector StandardizedDataset::standardize_row(const Vector& x_raw) const {
  return (x_raw - col_means).cwiseQuotient(col_scales);
}

double StandardizedDataset::predict(const Vector& x_raw, const Vector& beta_std) const {
  return y_mean + standardize_row(x_raw).dot(beta_std);
}

Vector StandardizedDataset::coefficients_original_scale(const Vector& beta_std) const {
  return beta_std.cwiseQuotient(col_scales);
}

StandardizedDataset standardize(const Dataset& ds) {
  ds.validate();
  const auto n = static_cast<double>(ds.n());
  StandardizedDataset out;
  out.column_names = ds.column_names;
  out.y_mean = ds.y.mean();
  out.y = ds.y.array() - out.y_mean;
  out.col_means = ds.X.colwise().mean().transpose();
  out.X = ds.X.rowwise() - out.col_means.transpose();
  out.col_scales.resize(ds.X.cols());
  for (Eigen::Index j = 0; j < ds.X.cols(); ++j) {
    const double scale = std::sqrt(out.X.col(j).squaredNorm() / n);
    const double magnitude = std::max(1.0, ds.X.col(j).cwiseAbs().maxCoeff());
    if (!(scale > 1e-12 * magnitude)) {
      const std::string name = j < static_cast<Eigen::Index>(ds.column_names.size())
                                   ? ds.column_names[j]
                                   : "x" + std::to_string(j + 1);
      throw DataError("column '" + name + "' is constant and cannot be standardized");
    }
    out.col_scales(j) = scale;
    out.X.col(j) /= scale;
  }
  return out;
}

StandardizedDataset as_model_data(const Matrix& X, const Vector& y) {
  StandardizedDataset out;
  out.X = X;
  out.y = y;
  out.col_means = Vector::Zero(X.cols());
  out.col_scales = Vector::Ones(X.cols());
  return out;
}

Dataset parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_fields(line);
      break;
    }
  }
  if (header.empty()) throw DataError(source + ": empty file");

  std::ptrdiff_t y_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "y") {
      if (y_col >= 0) throw DataError(source + ": more than one column named 'y'");
      y_col = static_cast<std::ptrdiff_t>(c);
    }
  }
  if (y_col < 0) throw DataError(source + ": no column named 'y' in header");

  Dataset ds;
  ds.provenance = source;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<std::ptrdiff_t>(c) != y_col) ds.column_names.push_back(header[c]);
  }

  std::vector<std::vector<double>> rows;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++data_row;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(source + ": row " + std::to_string(data_row) + " (line " +
                      std::to_string(line_no) + ") has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_double(fields[c], values[c])) {
        throw DataError(source + ": row " + std::to_string(data_row) + ", column '" +
                        header[c] + "': non-numeric value '" + fields[c] + "'");
      }
    }
    rows.push_back(std::move(values));
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(header.size() - 1);
  ds.y.resize(n);
  ds.X.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == y_col) {
        ds.y(i) = rows[i][c];
      } else {
        ds.X(i, j++) = rows[i][c];
      }
    }
  }
  ds.validate();
  return ds;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_csv(in, path.string());
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const Dataset& ds, std::ostream& out) {
  out << "y";
  for (std::size_t j = 0; j < ds.p(); ++j) {
    out << ',' << (j < ds.column_names.size() ? ds.column_names[j] : "x" + std::to_string(j + 1));
  }
  out << '\n';
  for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
    out << format_number(ds.y(i));
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j) out << ',' << format_number(ds.X(i, j));
    out << '\n';
  }
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ostringstream os;
  write_csv(ds, os);
  write_file_atomic(path, os.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fusedhs
