#pragma once

#include "pbf/curves.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pbf {

enum class HeaderMode {
  Auto,  // first row is a header iff it holds a non-numeric cell
  Yes,
  No,
};

HeaderMode parse_header_mode(std::string_view text);

struct CsvOptions {
  Representation repr = Representation::Grid;
  HeaderMode header = HeaderMode::Auto;
  /// Abscissae from a --grid file; overrides a header row.
  std::optional<std::vector<double>> grid_points;
  Quadrature rule = Quadrature::Trapezoid;
  /// Column holding group tags, by header name or 0-based index. When unset,
  /// a header column named "group" or "label" is used if present.
  std::optional<std::string> label_column;
  /// Tag of the first sample; defaults to the first tag in sorted order.
  std::optional<std::string> first_group;
};

/// Wide curve table: one row per curve, one column per grid point / coefficient.
struct CurveTable {
  Eigen::MatrixXd rows;
  /// Group tag per kept row (empty when there is no label column).
  std::vector<std::string> tags;
  /// Abscissae from a numeric header row, if any.
  std::optional<std::vector<double>> abscissae;
  std::size_t dropped_count = 0;
};

/// Parses wide CSV text. Rows with an empty or NA/NaN cell are dropped and
/// counted. Throws DataError on non-numeric cells, ragged rows or no usable row.
CurveTable parse_curve_csv(std::istream& in, const CsvOptions& options);
CurveTable read_curve_csv(const std::string& path, const CsvOptions& options);

/// One-line file of grid abscissae (comma or whitespace separated).
std::vector<double> read_grid_file(const std::string& path);

struct IngestResult {
  FunctionalSample sample;
  std::size_t dropped_count = 0;
};

/// One labelled file: the label column splits rows into the two samples.
IngestResult ingest_csv(const std::string& path, const CsvOptions& options);

/// Two files, one per sample.
IngestResult ingest_csv_pair(const std::string& x_path, const std::string& y_path,
                             const CsvOptions& options);

/// Builds the grid for `columns` values: explicit points, else header
/// abscissae, else equispaced on [0, 1].
GridSpec resolve_grid(std::size_t columns, const CsvOptions& options,
                      const std::optional<std::vector<double>>& header_abscissae);

/// Writes a labelled curve table: header "group,<abscissae or c1..cd>", then
/// one row per curve tagged x or y. Values use round-trip precision.
void write_curves_csv(std::ostream& out, const FunctionalSample& sample);

}  // namespace pbf
