#include "pbf/curves.hpp"
#include "pbf/errors.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace pbf;

namespace {

Eigen::MatrixXd sampled(const GridSpec& grid, double (*f)(double), std::size_t rows = 1) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(grid.size()));
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) = f(grid.points()[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace

TEST_CASE("coefficient inner products are dot products") {
  const Curve a{Representation::Coeff, {1.0, 0.0}};
  const Curve b{Representation::Coeff, {0.0, 1.0}};
  CHECK(inner_product(a, b) == 0.0);
  CHECK(inner_product(a, a) == 1.0);
}

TEST_CASE("trapezoid inner products on a 101-point grid") {
  const GridSpec grid = GridSpec::equispaced(101);
  std::vector<double> one(101, 1.0);
  std::vector<double> t = grid.points();
  const Curve c1{Representation::Grid, one};
  const Curve ct{Representation::Grid, t};
  CHECK(inner_product(c1, ct, &grid) == doctest::Approx(0.5).epsilon(1e-12));
  // Trapezoid error for t^2 is h^2 / 6 = 1.67e-5.
  CHECK(std::abs(inner_product(ct, ct, &grid) - 1.0 / 3.0) <= 2e-5);
}

TEST_CASE("left Riemann rule weights") {
  const GridSpec grid = GridSpec::equispaced(5, 0.0, 1.0, Quadrature::RiemannLeft);
  const auto& w = grid.weights();
  CHECK(w[0] == doctest::Approx(0.25));
  CHECK(w[3] == doctest::Approx(0.25));
  CHECK(w[4] == 0.0);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(GridSpec({0.0}), InvalidArgument);
  CHECK_THROWS_AS(GridSpec({0.0, 0.5, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(GridSpec({0.0, NAN}), InvalidArgument);
  CHECK(GridSpec::equispaced(11).is_equispaced());
  CHECK_FALSE(GridSpec({0.0, 0.1, 0.5}).is_equispaced());
}

TEST_CASE("mismatched curves are rejected") {
  const Curve a{Representation::Coeff, {1.0}};
  const Curve b{Representation::Coeff, {1.0, 2.0}};
  CHECK_THROWS_AS(inner_product(a, b), InvalidArgument);
  const Curve g{Representation::Grid, {1.0, 2.0}};
  CHECK_THROWS_AS(inner_product(g, g), InvalidArgument);
}

TEST_CASE("single constant curve has Gram [[1]]") {
  Eigen::MatrixXd rows(1, 1);
  rows << 1.0;
  const GramMatrix g = gram(rows, Representation::Coeff);
  REQUIRE(g.size() == 1);
  CHECK(g(0, 0) == 1.0);
}

TEST_CASE("Gram of {1, t} on a fine grid") {
  const GridSpec grid = GridSpec::equispaced(2001);
  Eigen::MatrixXd rows(2, 2001);
  rows.row(0) = sampled(grid, [](double) { return 1.0; });
  rows.row(1) = sampled(grid, [](double t) { return t; });
  const GramMatrix g = gram(rows, Representation::Grid, &grid);
  CHECK(g(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(g(1, 1) - 1.0 / 3.0) < 1e-7);
}

TEST_CASE("Gram is bit-exactly symmetric") {
  const GridSpec grid = GridSpec::equispaced(37);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GramMatrix gc = testing::random_gram(9, 5, seed);
    CHECK((gc.values.array() == gc.values.transpose().array()).all());
    const GramMatrix gg = gram(testing::random_rows(8, 37, seed), Representation::Grid, &grid, 2);
    CHECK((gg.values.array() == gg.values.transpose().array()).all());
  }
}

TEST_CASE("shared orthogonal transform leaves the Gram matrix unchanged") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd x = testing::random_rows(10, 6, seed);
    const Eigen::MatrixXd q = testing::random_orthogonal(6, seed + 100);
    const GramMatrix a = gram(x, Representation::Coeff);
    const GramMatrix b = gram(x * q, Representation::Coeff);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("grid refinement changes Gram entries at second order") {
  auto f = [](double t) { return std::sin(3.0 * t) + t * t; };
  auto error = [&](std::size_t points) {
    const GridSpec grid = GridSpec::equispaced(points);
    Eigen::MatrixXd rows(1, static_cast<Eigen::Index>(points));
    for (std::size_t j = 0; j < points; ++j) rows(0, static_cast<Eigen::Index>(j)) = f(grid.points()[j]);
    const GramMatrix g = gram(rows, Representation::Grid, &grid);
    // int_0^1 (sin 3t + t^2)^2 dt, from the closed form of each term.
    const double exact = 0.5 - std::sin(6.0) / 12.0 + 0.2 +
                         2.0 * ((2.0 - 9.0) * std::cos(3.0) / 27.0 + 6.0 * std::sin(3.0) / 27.0 - 2.0 / 27.0);
    return std::abs(g(0, 0) - exact);
  };
  const double coarse = error(101);
  const double fine = error(1001);
  CHECK(coarse < 1e-3);
  CHECK(fine < coarse / 50.0);
}

TEST_CASE("labels and samples") {
  const Labels l = block_labels(2, 3);
  CHECK(l == Labels{0, 0, 1, 1, 1});
  const GroupSizes s = group_sizes(l);
  CHECK(s.n == 2);
  CHECK(s.m == 3);
  CHECK_THROWS_AS(group_sizes(Labels{0, 0}), InvalidArgument);
  CHECK_THROWS_AS(group_sizes(Labels{0, 2}), InvalidArgument);

  const Eigen::MatrixXd x = testing::random_rows(2, 3, 1);
  const Eigen::MatrixXd y = testing::random_rows(3, 3, 2);
  const FunctionalSample s2 = FunctionalSample::from_groups(Representation::Coeff, x, y);
  CHECK(s2.n() == 2);
  CHECK(s2.m() == 3);
  CHECK(s2.group(1).isApprox(y));
  CHECK(s2.curve(0).values[2] == x(0, 2));

  Eigen::MatrixXd bad = x;
  bad(0, 0) = NAN;
  CHECK_THROWS_AS(FunctionalSample::from_groups(Representation::Coeff, bad, y), DataError);
  CHECK_THROWS_AS(FunctionalSample::from_groups(Representation::Grid, x, y), InvalidArgument);
}

TEST_CASE("cross Gram agrees with the pooled Gram") {
  const Eigen::MatrixXd a = testing::random_rows(4, 5, 3);
  const Eigen::MatrixXd b = testing::random_rows(3, 5, 4);
  Eigen::MatrixXd pooled(7, 5);
  pooled << a, b;
  const GramMatrix g = gram(pooled, Representation::Coeff);
  const Eigen::MatrixXd c = cross_gram(a, b, Representation::Coeff);
  CHECK((c - g.values.block(0, 4, 4, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Gram counter increments once per computation") {
  const auto before = gram_evaluations();
  gram(testing::random_rows(3, 2, 1), Representation::Coeff);
  CHECK(gram_evaluations() == before + 1);
}

TEST_CASE("representation names round trip") {
  CHECK(parse_representation(to_string(Representation::Grid)) == Representation::Grid);
  CHECK(parse_representation("coeff") == Representation::Coeff);
  CHECK(parse_quadrature("riemann-left") == Quadrature::RiemannLeft);
  CHECK_THROWS_AS(parse_representation("fourier"), InvalidArgument);
}
