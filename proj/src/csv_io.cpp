#include "pbf/csv_io.hpp"

#include "pbf/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace pbf {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view cell =
        std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start);
    cells.emplace_back(trim(cell));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool is_missing(std::string_view cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan" ||
         cell == "NAN";
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

bool row_is_numeric(const std::vector<std::string>& cells, std::optional<std::size_t> skip) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (skip && *skip == i) continue;
    if (!is_missing(cells[i]) && !parse_number(cells[i])) return false;
  }
  return true;
}

std::optional<std::size_t> index_of_label(const std::optional<std::string>& column,
                                          const std::vector<std::string>* header) {
  if (column) {
    if (header) {
      const auto it = std::find(header->begin(), header->end(), *column);
      if (it != header->end()) return static_cast<std::size_t>(it - header->begin());
    }
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(column->data(), column->data() + column->size(), idx);
    if (ec == std::errc() && ptr == column->data() + column->size()) return idx;
    throw DataError("label column '" + *column + "' not found");
  }
  if (header) {
    for (std::size_t i = 0; i < header->size(); ++i)
      if ((*header)[i] == "group" || (*header)[i] == "label") return i;
  }
  return std::nullopt;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

HeaderMode parse_header_mode(std::string_view text) {
  if (text == "auto") return HeaderMode::Auto;
  if (text == "yes" || text == "true") return HeaderMode::Yes;
  if (text == "no" || text == "false") return HeaderMode::No;
  throw InvalidArgument("header mode must be auto, yes or no");
}

CurveTable parse_curve_csv(std::istream& in, const CsvOptions& options) {
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    lines.push_back(split_row(line));
  }
  if (lines.empty()) throw DataError("CSV has no rows");

  // A label column given by index can be resolved before the header decision.
  std::optional<std::size_t> label_by_index;
  if (options.label_column) {
    std::size_t idx = 0;
    const auto& c = *options.label_column;
    const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), idx);
    if (ec == std::errc() && ptr == c.data() + c.size()) label_by_index = idx;
  }

  bool has_header = false;
  switch (options.header) {
    case HeaderMode::Yes:
      has_header = true;
      break;
    case HeaderMode::No:
      has_header = false;
      break;
    case HeaderMode::Auto:
      has_header = !row_is_numeric(lines.front(), label_by_index);
      break;
  }
  const std::vector<std::string>* header = has_header ? &lines.front() : nullptr;
  const std::optional<std::size_t> label_col = index_of_label(options.label_column, header);

  const std::size_t width = lines.front().size();
  if (label_col && *label_col >= width) throw DataError("label column index out of range");
  const std::size_t value_cols = width - (label_col ? 1 : 0);
  if (value_cols == 0) throw DataError("CSV has no value columns");

  CurveTable table;
  if (header) {
    std::vector<double> xs;
    bool numeric = true;
    for (std::size_t i = 0; i < width && numeric; ++i) {
      if (label_col && *label_col == i) continue;
      const auto v = parse_number((*header)[i]);
      if (v)
        xs.push_back(*v);
      else
        numeric = false;
    }
    if (numeric) table.abscissae = std::move(xs);
  }

  std::vector<std::vector<double>> kept;
  for (std::size_t r = has_header ? 1 : 0; r < lines.size(); ++r) {
    const auto& cells = lines[r];
    if (cells.size() != width)
      throw DataError("row " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(width));
    std::vector<double> values;
    values.reserve(value_cols);
    bool missing = false;
    std::string tag;
    for (std::size_t i = 0; i < width; ++i) {
      if (label_col && *label_col == i) {
        if (is_missing(cells[i])) missing = true;
        tag = cells[i];
        continue;
      }
      if (is_missing(cells[i])) {
        missing = true;
        continue;
      }
      const auto v = parse_number(cells[i]);
      if (!v)
        throw DataError("row " + std::to_string(r + 1) + ", column " + std::to_string(i + 1) +
                        ": '" + cells[i] + "' is not a number");
      if (!std::isfinite(*v)) {
        missing = true;
        continue;
      }
      values.push_back(*v);
    }
    if (missing) {
      ++table.dropped_count;
      continue;
    }
    kept.push_back(std::move(values));
    if (label_col) table.tags.push_back(std::move(tag));
  }
  if (kept.empty()) throw DataError("CSV has no usable rows");

  table.rows.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(value_cols));
  for (std::size_t r = 0; r < kept.size(); ++r)
    for (std::size_t c = 0; c < value_cols; ++c)
      table.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = kept[r][c];
  return table;
}

CurveTable read_curve_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return parse_curve_csv(in, options);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<double> read_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open grid file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream tokens(text);
  std::vector<double> points;
  std::string tok;
  while (tokens >> tok) {
    const auto v = parse_number(tok);
    if (!v) throw DataError("grid file: '" + tok + "' is not a number");
    points.push_back(*v);
  }
  if (points.empty()) throw DataError("grid file is empty");
  return points;
}

GridSpec resolve_grid(std::size_t columns, const CsvOptions& options,
                      const std::optional<std::vector<double>>& header_abscissae) {
  std::vector<double> points;
  if (options.grid_points)
    points = *options.grid_points;
  else if (header_abscissae)
    points = *header_abscissae;
  else
    return GridSpec::equispaced(columns, 0.0, 1.0, options.rule);
  if (points.size() != columns)
    throw DataError("grid has " + std::to_string(points.size()) + " points but curves have " +
                    std::to_string(columns) + " values");
  try {
    return GridSpec(std::move(points), options.rule);
  } catch (const InvalidArgument& e) {
    throw DataError(e.what());
  }
}

namespace {

IngestResult make_sample(Eigen::MatrixXd x, Eigen::MatrixXd y, const CsvOptions& options,
                         const std::optional<std::vector<double>>& abscissae,
                         std::size_t dropped) {
  if (x.rows() == 0 || y.rows() == 0) throw DataError("both samples need at least one curve");
  if (x.cols() != y.cols()) throw DataError("the two samples have different curve lengths");
  std::optional<GridSpec> grid;
  if (options.repr == Representation::Grid)
    grid = resolve_grid(static_cast<std::size_t>(x.cols()), options, abscissae);
  return IngestResult{FunctionalSample::from_groups(options.repr, x, y, std::move(grid)), dropped};
}

}  // namespace

IngestResult ingest_csv(const std::string& path, const CsvOptions& options) {
  CurveTable table = read_curve_csv(path, options);
  if (table.tags.empty()) throw DataError(path + ": no label column to split the two samples");
  std::set<std::string> distinct(table.tags.begin(), table.tags.end());
  if (distinct.size() != 2)
    throw DataError(path + ": label column must hold exactly two distinct tags, found " +
                    std::to_string(distinct.size()));
  const std::string first = options.first_group.value_or(*distinct.begin());
  if (!distinct.contains(first)) throw DataError("first-group tag '" + first + "' not present");

  std::vector<Eigen::Index> xi;
  std::vector<Eigen::Index> yi;
  for (std::size_t r = 0; r < table.tags.size(); ++r)
    (table.tags[r] == first ? xi : yi).push_back(static_cast<Eigen::Index>(r));
  Eigen::MatrixXd x = table.rows(xi, Eigen::all);
  Eigen::MatrixXd y = table.rows(yi, Eigen::all);
  return make_sample(std::move(x), std::move(y), options, table.abscissae, table.dropped_count);
}

IngestResult ingest_csv_pair(const std::string& x_path, const std::string& y_path,
                             const CsvOptions& options) {
  CurveTable x = read_curve_csv(x_path, options);
  CurveTable y = read_curve_csv(y_path, options);
  auto abscissae = x.abscissae ? x.abscissae : y.abscissae;
  return make_sample(std::move(x.rows), std::move(y.rows), options, abscissae,
                     x.dropped_count + y.dropped_count);
}

void write_curves_csv(std::ostream& out, const FunctionalSample& sample) {
  out << "group";
  if (sample.kind() == Representation::Grid) {
    for (double t : sample.grid()->points()) out << ',' << format_double(t);
  } else {
    for (std::size_t j = 0; j < sample.dimension(); ++j) out << ",c" << (j + 1);
  }
  out << '\n';
  const auto& data = sample.data();
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    out << (sample.labels()[static_cast<std::size_t>(i)] == 0 ? 'x' : 'y');
    for (Eigen::Index j = 0; j < data.cols(); ++j) out << ',' << format_double(data(i, j));
    out << '\n';
  }
}

}  // namespace pbf
