#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fusedhs/linalg.hpp"

namespace fusedhs {

/// Response vector and design matrix, as read from disk or generated.
struct Dataset {
  Vector y;
  Matrix X;
  std::vector<std::string> column_names;
  std::string provenance;

  std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(X.cols()); }

  /// Throws DataError unless n >= 2, p >= 1, shapes agree and every value is finite.
  void validate() const;

  /// Copy with row `i` removed.
  Dataset without_row(std::size_t i) const;
};

/// Centered response and standardized design (column sums 0, column sums
/// of squares n), plus the transform used to produce them.
struct StandardizedDataset {
  Vector y;          // centered response
  Matrix X;          // standardized design
  double y_mean = 0.0;
  Vector col_means;
  Vector col_scales;  // sqrt(sum of squares / n) after centering
  std::vector<std::string> column_names;

  std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(X.cols()); }

  /// Apply the stored column transform to a raw design row.
  Vector standardize_row(const Vector& x_raw) const;

  /// Prediction on the response's original scale for a raw design row.
  double predict(const Vector& x_raw, const Vector& beta_std) const;

  /// Coefficients on the original predictor scale (beta_j / scale_j).
  Vector coefficients_original_scale(const Vector& beta_std) const;
};

/// Centers y and scales every column of X to mean 0 and sum of squares n.
/// Throws DataError naming the first constant column.
StandardizedDataset standardize(const Dataset& ds);

/// Builds a StandardizedDataset around X and y without transforming them.
/// Used where the model is run on data that is already on the model scale.
StandardizedDataset as_model_data(const Matrix& X, const Vector& y);

/// Reads a CSV with a header row. The column named `y` is the response and
/// the remaining columns, in header order, form X.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::istream& in, const std::string& source);

/// Writes `y` first, then the design columns; 17 significant digits.
void write_csv(const Dataset& ds, std::ostream& out);
void write_csv(const Dataset& ds, const std::filesystem::path& path);

/// %.17g rendering used by every CSV writer; round-trips doubles exactly.
std::string format_number(double v);

/// Writes `content` to a temporary sibling of `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace fusedhs
