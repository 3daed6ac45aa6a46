#include "projgeom/linalg.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace projgeom;
namespace pt = projgeom::testing;

TEST_CASE("op_norm on simple inputs") {
  CHECK(op_norm(Matrix::Identity(3, 3)) == Catch::Approx(1.0).margin(1e-14));
  CHECK(op_norm(Matrix::Zero(2, 2)) == Catch::Approx(0.0).margin(1e-14));

  Matrix nilpotent(2, 2);
  nilpotent << 0, 2, 0, 0;
  CHECK(op_norm(nilpotent) == Catch::Approx(2.0).margin(1e-14));
}

TEST_CASE("op_norm rejects empty input") {
  CHECK_THROWS_AS(op_norm(Matrix(0, 0)), ValidationError);
}

TEST_CASE("hermitian_eig on diagonal and rank-one inputs") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 0.25;
  const HermitianSpectrum s = hermitian_eig(d);
  CHECK(s.eigenvalues(0) == Catch::Approx(1.0).margin(1e-14));
  CHECK(s.eigenvalues(1) == Catch::Approx(0.25).margin(1e-14));
  CHECK(s.eigenvalues(2) == Catch::Approx(0.0).margin(1e-14));

  // Rank-one projection: characteristic polynomial gives {1, 0}.
  Matrix r(2, 2);
  r << 0.5, 0.5, 0.5, 0.5;
  const HermitianSpectrum rs = hermitian_eig(r);
  CHECK(rs.eigenvalues(0) == Catch::Approx(1.0).margin(1e-14));
  CHECK(rs.eigenvalues(1) == Catch::Approx(0.0).margin(1e-14));

  const HermitianSpectrum zs = hermitian_eig(Matrix::Zero(4, 4));
  CHECK(zs.eigenvalues.cwiseAbs().maxCoeff() == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_WITH(hermitian_eig(m),
                    Catch::Matchers::ContainsSubstring("not Hermitian"));
}

TEST_CASE("hermitian_eig reconstruction and unitarity on random input") {
  std::mt19937_64 rng(12345);
  for (Eigen::Index n : {2, 5, 16, 33, 64}) {
    const Matrix a = pt::random_hermitian(n, rng);
    const HermitianSpectrum s = hermitian_eig(a);
    const Matrix recon =
        s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
    CHECK(op_norm(a - recon) <= 1e-10 * std::max(1.0, op_norm(a)));
    CHECK(op_norm(s.eigenvectors.adjoint() * s.eigenvectors -
                  Matrix::Identity(n, n)) <= 1e-10);
    for (Eigen::Index i = 1; i < n; ++i)
      CHECK(s.eigenvalues(i) <= s.eigenvalues(i - 1) + 1e-14);
  }
}

TEST_CASE("op_norm is unitarily invariant and submultiplicative") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 3 + trial % 8;
    const Matrix a = pt::random_complex(n, n, rng);
    const Matrix b = pt::random_complex(n, n, rng);
    const Matrix u = pt::random_unitary(n, rng);
    const Matrix v = pt::random_unitary(n, rng);
    CHECK(op_norm(u * a * v) == Catch::Approx(op_norm(a)).margin(1e-10));
    CHECK(op_norm(a * b) <= op_norm(a) * op_norm(b) + 1e-10);
  }
}

TEST_CASE("cluster_eigenvalues merges and separates as requested") {
  RealVector nearly(3);
  nearly << 1.0, 1.0 - 1e-14, 0.0;
  auto c = cluster_eigenvalues(nearly, 1e-9);
  REQUIRE(c.size() == 2);
  CHECK(c[0].value == Catch::Approx(1.0).margin(1e-12));
  CHECK(c[0].multiplicity == 2);
  CHECK(c[1].value == Catch::Approx(0.0).margin(1e-12));
  CHECK(c[1].multiplicity == 1);

  RealVector separated(3);
  separated << 0.9, 0.5, 0.1;
  CHECK(cluster_eigenvalues(separated, 0.01).size() == 3);

  // cos^2(1/n) for n = 2..6: all pairwise gaps exceed 1e-3, so five clusters.
  RealVector cosines(5);
  for (int n = 2; n <= 6; ++n)
    cosines(6 - n) = std::pow(std::cos(1.0 / n), 2);  // ascending n -> descending? store sorted below
  std::sort(cosines.data(), cosines.data() + 5, std::greater<double>());
  double min_gap = 1.0;
  for (int i = 1; i < 5; ++i) min_gap = std::min(min_gap, cosines(i - 1) - cosines(i));
  REQUIRE(min_gap > 1e-3);
  CHECK(cluster_eigenvalues(cosines, 1e-3).size() == 5);

  CHECK_THROWS_AS(cluster_eigenvalues(separated, 0.0), ValidationError);
}

TEST_CASE("cluster multiplicities always sum to the input size") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 17;
    RealVector vals(n);
    for (int i = 0; i < n; ++i) vals(i) = unif(rng);
    std::sort(vals.data(), vals.data() + n, std::greater<double>());
    int total = 0;
    for (const auto& c : cluster_eigenvalues(vals, unif(rng) * 0.2 + 1e-6))
      total += c.multiplicity;
    CHECK(total == n);
  }
}

TEST_CASE("Tolerance validation") {
  Tolerance tol;
  CHECK_NOTHROW(tol.validate());
  tol.eq_tol = 1e-3;  // above cluster_tol
  CHECK_THROWS_AS(tol.validate(), ValidationError);
}
