#include <doctest.h>

#include <cmath>

#include "reggames/linalg.hpp"
#include "reggames/rng.hpp"

using namespace reggames;

TEST_CASE("svd reproduces the matrix and orthogonal factors") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = rng.uniform_int(1, 8);
    const int n = rng.uniform_int(1, 8);
    Mat a(m, n);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) a(r, c) = rng.normal();
    SvdResult s = svd(a);
    // descending singular values
    for (size_t j = 1; j < s.sigma.size(); ++j) CHECK(s.sigma[j - 1] >= s.sigma[j]);
    // A = U diag(sigma) V^T
    Mat usv(m, n);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) {
        double acc = 0.0;
        for (int k = 0; k < static_cast<int>(s.sigma.size()); ++k)
          acc += s.u(r, k) * s.sigma[k] * s.v(c, k);
        usv(r, c) = acc;
      }
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) CHECK(usv(r, c) == doctest::Approx(a(r, c)).epsilon(1e-10));
    // V orthogonal
    Mat vtv = s.v.transposed() * s.v;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        CHECK(vtv(r, c) == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-10));
  }
}

TEST_CASE("svd of a known diagonal") {
  Mat a(3, 2);
  a(0, 0) = 3.0;
  a(1, 1) = -2.0;
  const auto s = singular_values(a);
  CHECK(s[0] == doctest::Approx(3.0));
  CHECK(s[1] == doctest::Approx(2.0));
}

TEST_CASE("least squares matches the normal-equation solution") {
  // fit y = 2x + 1 on three points
  Mat a(3, 2);
  std::vector<double> b{1.0, 3.0, 5.0};
  for (int r = 0; r < 3; ++r) {
    a(r, 0) = r;
    a(r, 1) = 1.0;
  }
  const LstsqResult res = solve_least_squares(a, b);
  CHECK(res.rank == 2);
  CHECK(res.x[0] == doctest::Approx(2.0));
  CHECK(res.x[1] == doctest::Approx(1.0));
  CHECK(res.residual < 1e-12);
}

TEST_CASE("minimum-norm solution of an underdetermined system") {
  Mat a(1, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  const LstsqResult res = solve_least_squares(a, {1.0});
  CHECK(res.rank == 1);
  CHECK(res.x[0] == doctest::Approx(0.5));
  CHECK(res.x[1] == doctest::Approx(0.5));
}

TEST_CASE("nullspace basis spans the kernel") {
  Mat a(1, 3);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  const Mat basis = nullspace(a);
  REQUIRE(basis.cols() == 2);
  for (int c = 0; c < basis.cols(); ++c) {
    double dot = 0.0;
    for (int r = 0; r < 3; ++r) dot += a(0, r) * basis(r, c);
    CHECK(std::fabs(dot) < 1e-12);
  }
}

TEST_CASE("min singular ratio flags rank deficiency") {
  Mat singular(2, 2);
  singular(0, 0) = 1.0;
  singular(0, 1) = 2.0;
  singular(1, 0) = 2.0;
  singular(1, 1) = 4.0;
  CHECK(min_singular_ratio(singular) < 1e-12);
  CHECK(min_singular_ratio(Mat::identity(3)) == doctest::Approx(1.0));
}
