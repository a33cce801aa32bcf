#include "pbf/csv_io.hpp"
#include "pbf/errors.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pbf;

namespace {

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("pbf_csv_" + name);
  std::ofstream(path) << text;
  return path.string();
}

CurveTable parse(const std::string& text, CsvOptions o = {}) {
  std::istringstream in(text);
  return parse_curve_csv(in, o);
}

}  // namespace

TEST_CASE("rows with a missing cell are dropped") {
  const CurveTable t = parse("1,2,3\n4,,6\n7,8,9\n");
  CHECK(t.rows.rows() == 2);
  CHECK(t.dropped_count == 1);
  CHECK(t.rows(1, 0) == 7.0);
  CHECK(parse("1,NA,3\n1,2,3\n").dropped_count == 1);
  CHECK(parse("1,NaN,3\n1,2,3\n").dropped_count == 1);
}

TEST_CASE("93 abscissae in the header") {
  std::ostringstream text;
  for (int j = 0; j < 93; ++j) text << (j ? "," : "") << j / 92.0;
  text << '\n';
  for (int r = 0; r < 4; ++r) {
    for (int j = 0; j < 93; ++j) text << (j ? "," : "") << r + j * 0.01;
    text << '\n';
  }
  CsvOptions o;
  o.header = HeaderMode::Yes;
  const CurveTable t = parse(text.str(), o);
  CHECK(t.rows.rows() == 4);
  CHECK(t.rows.cols() == 93);
  REQUIRE(t.abscissae);
  CHECK(t.abscissae->size() == 93);
  const GridSpec grid = resolve_grid(93, o, t.abscissae);
  CHECK(grid.size() == 93);
  CHECK(grid.points().back() == doctest::Approx(1.0));

  // Without the header flag the numeric first row is data.
  CHECK(parse(text.str()).rows.rows() == 5);
}

TEST_CASE("malformed files") {
  CHECK_THROWS_AS(parse("1,2,3\n4,5\n"), DataError);
  CHECK_THROWS_AS(parse("a,b\n1,x\n"), DataError);
  CHECK_THROWS_AS(parse(",\n"), DataError);
  CHECK_THROWS_AS(parse(""), DataError);
  CHECK_THROWS_AS(read_curve_csv("/nonexistent/file.csv", {}), DataError);
}

TEST_CASE("header detection and label columns") {
  const std::string text = "id,t0,t1\nb,1,2\na,3,4\nb,5,6\n";
  CsvOptions o;
  o.label_column = "id";
  const CurveTable t = parse(text, o);
  CHECK(t.rows.rows() == 3);
  CHECK(t.rows.cols() == 2);
  CHECK(t.tags == std::vector<std::string>{"b", "a", "b"});
  CHECK_FALSE(t.abscissae);

  CsvOptions by_index;
  by_index.label_column = "0";
  by_index.header = HeaderMode::No;
  const CurveTable u = parse("x,1,2\ny,3,4\n", by_index);
  CHECK(u.rows.rows() == 2);
  CHECK(u.tags.front() == "x");

  CsvOptions missing;
  missing.label_column = "nope";
  CHECK_THROWS_AS(parse(text, missing), DataError);

  CHECK(parse("group,0,1\nx,1,2\ny,3,4\n").tags.size() == 2);
}

TEST_CASE("labelled file splits into two samples") {
  const std::string path = temp_file("labelled.csv", "label,0,0.5,1\nx,1,2,3\ny,4,5,6\nx,7,8,9\n");
  const IngestResult r = ingest_csv(path, {});
  CHECK(r.sample.n() == 2);
  CHECK(r.sample.m() == 1);
  CHECK(r.sample.grid()->size() == 3);
  CHECK(r.sample.data()(1, 0) == 7.0);

  CsvOptions first_y;
  first_y.first_group = "y";
  CHECK(ingest_csv(path, first_y).sample.n() == 1);

  const std::string three = temp_file("three.csv", "group,a,b\nx,1,2\ny,3,4\nz,5,6\n");
  CHECK_THROWS_AS(ingest_csv(three, {}), DataError);
}

TEST_CASE("two files and explicit grids") {
  const std::string x = temp_file("x.csv", "1,2,3\n4,5,6\n");
  const std::string y = temp_file("y.csv", "7,8,9\n");
  CsvOptions o;
  o.grid_points = std::vector<double>{0.0, 0.2, 1.0};
  const IngestResult r = ingest_csv_pair(x, y, o);
  CHECK(r.sample.size() == 3);
  CHECK(r.sample.grid()->points()[1] == 0.2);

  o.grid_points = std::vector<double>{0.0, 1.0};
  CHECK_THROWS_AS(ingest_csv_pair(x, y, o), DataError);

  const std::string y2 = temp_file("y2.csv", "7,8\n");
  CHECK_THROWS_AS(ingest_csv_pair(x, y2, {}), DataError);

  const std::string g = temp_file("grid.txt", "0, 0.25 1\n");
  CHECK(read_grid_file(g) == std::vector<double>{0.0, 0.25, 1.0});
}

TEST_CASE("written samples read back bit-exactly") {
  const Eigen::MatrixXd x = testing::random_rows(3, 4, 1);
  const Eigen::MatrixXd y = testing::random_rows(2, 4, 2);
  for (Representation kind : {Representation::Grid, Representation::Coeff}) {
    std::optional<GridSpec> grid;
    if (kind == Representation::Grid) grid = GridSpec({0.0, 0.1, 0.35, 1.0});
    const FunctionalSample s = FunctionalSample::from_groups(kind, x, y, grid);
    std::ostringstream out;
    write_curves_csv(out, s);
    const std::string path = temp_file("roundtrip.csv", out.str());
    CsvOptions o;
    o.repr = kind;
    const IngestResult back = ingest_csv(path, o);
    CHECK(back.sample.data() == s.data());
    CHECK(back.sample.labels() == s.labels());
    if (grid) CHECK(back.sample.grid()->points() == grid->points());
  }
}

TEST_CASE("header modes parse") {
  CHECK(parse_header_mode("auto") == HeaderMode::Auto);
  CHECK(parse_header_mode("yes") == HeaderMode::Yes);
  CHECK(parse_header_mode("no") == HeaderMode::No);
  CHECK_THROWS_AS(parse_header_mode("maybe"), InvalidArgument);
}
