#include "projgeom/algebra.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace projgeom;
namespace pt = projgeom::testing;

namespace {

Matrix diag3(double a, double b, double c) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

}  // namespace

TEST_CASE("span_closure dimensions on canonical generators") {
  Matrix e11 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  CHECK(SpanAlgebra::span_closure({e11}).dim() == 1);

  // A generic planar pair generates all of the 2x2 matrices.
  const auto [p, q] = planar_pair(M_PI / 5);
  CHECK(SpanAlgebra::span_closure({p.matrix(), q.matrix()}).dim() == 4);

  // Commuting diagonal projections: dimension = number of distinct atoms hit.
  CHECK(SpanAlgebra::span_closure({diag3(1, 1, 0), diag3(1, 0, 1)}).dim() == 3);
}

TEST_CASE("span_closure input validation") {
  CHECK_THROWS_AS(SpanAlgebra::span_closure({}), ValidationError);
  CHECK_THROWS_AS(SpanAlgebra::span_closure({Matrix::Identity(2, 2),
                                             Matrix::Identity(3, 3)}),
                  ValidationError);
}

TEST_CASE("span_closure agrees with the word oracle on random generators") {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 12; ++trial) {
    const Eigen::Index n = 2 + trial % 5;  // <= 6
    const auto p = pt::random_projection(n, rng);
    const auto q = pt::random_projection(n, rng);
    const std::vector<Matrix> gens = {p.matrix(), q.matrix()};
    const SpanAlgebra alg = SpanAlgebra::span_closure(gens);
    CHECK(static_cast<int>(alg.dim()) == pt::word_closure_dimension(gens));
    CHECK(alg.dim() <= static_cast<std::size_t>(n * n));  // trivial upper bound
  }
}

TEST_CASE("span_closure is idempotent and its basis is HS-orthonormal") {
  const auto [p, q] = planar_pair(0.9);
  const SpanAlgebra alg = SpanAlgebra::span_closure({p.matrix(), q.matrix()});
  CHECK(SpanAlgebra::span_closure(alg.basis()).dim() == alg.dim());
  for (std::size_t i = 0; i < alg.dim(); ++i)
    for (std::size_t j = 0; j < alg.dim(); ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      CHECK(std::abs(hs_inner(alg.basis()[i], alg.basis()[j]) - expected) < 1e-10);
    }
}

TEST_CASE("membership_residual measures HS distance to the span") {
  Matrix e11 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  const SpanAlgebra alg = SpanAlgebra::span_closure({e11});
  CHECK(membership_residual(alg, e11) < 1e-12);
  // I = e11 + e22; only the e22 component sticks out.
  CHECK(membership_residual(alg, Matrix::Identity(2, 2)) ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(membership_residual(alg, Matrix::Identity(3, 3)),
                  ValidationError);
}

TEST_CASE("unit_of finds units and rejects their absence") {
  const auto [p, q] = planar_pair(1.1);
  const SpanAlgebra full = SpanAlgebra::span_closure({p.matrix(), q.matrix()});
  const auto u = unit_of(full);
  REQUIRE(u.has_value());
  CHECK(op_norm(u->matrix() - Matrix::Identity(2, 2)) < 1e-8);

  Matrix e11 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  const auto corner_unit = unit_of(SpanAlgebra::span_closure({e11}));
  REQUIRE(corner_unit.has_value());
  CHECK(op_norm(corner_unit->matrix() - e11) < 1e-8);

  // The span of a nilpotent alone is not an algebra with unit.
  Matrix nil = Matrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  const SpanAlgebra nilspan =
      SpanAlgebra::from_basis_unchecked(2, {nil});
  CHECK_FALSE(unit_of(nilspan).has_value());
}

TEST_CASE("center_of on a full matrix algebra") {
  const auto [p, q] = planar_pair(0.6);
  const SpanAlgebra alg = SpanAlgebra::span_closure({p.matrix(), q.matrix()});
  const CenterReport rep = center_of(alg);
  CHECK(rep.center_basis.size() == 1);
  REQUIRE(rep.block_dims.size() == 1);
  CHECK(rep.block_dims[0] == 2);
  CHECK(op_norm(rep.central_projections[0].matrix() - Matrix::Identity(2, 2)) <
        1e-8);
}

TEST_CASE("center_of on an abelian algebra") {
  const SpanAlgebra alg =
      SpanAlgebra::span_closure({diag3(1, 0, 0), diag3(0, 1, 0), diag3(0, 0, 1)});
  const CenterReport rep = center_of(alg);
  CHECK(rep.block_dims == std::vector<int>{1, 1, 1});
  Matrix total = Matrix::Zero(3, 3);
  for (const auto& z : rep.central_projections) {
    CHECK(z.rank() == 1);
    total += z.matrix();
  }
  CHECK(op_norm(total - Matrix::Identity(3, 3)) < 1e-8);
}

TEST_CASE("center_of separates a matrix block from a scalar block") {
  // Generators p ⊕ 1, q ⊕ 0 yield M_2 ⊕ C inside the 3x3 matrices.
  const auto [p, q] = planar_pair(0.8);
  const Matrix g1 = pt::direct_sum(p.matrix(), Matrix::Identity(1, 1));
  const Matrix g2 = pt::direct_sum(q.matrix(), Matrix::Zero(1, 1));
  const SpanAlgebra alg = SpanAlgebra::span_closure({g1, g2});
  CHECK(alg.dim() == 5);
  const CenterReport rep = center_of(alg);
  CHECK(rep.block_dims == std::vector<int>{2, 1});
  CHECK(rep.central_projections[0].rank() == 2);
  CHECK(rep.central_projections[1].rank() == 1);
}

TEST_CASE("center_of requires a unit") {
  Matrix nil = Matrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  CHECK_THROWS_AS(center_of(SpanAlgebra::from_basis_unchecked(2, {nil})),
                  NotApplicableError);
}

TEST_CASE("minimality_check on corners of a full matrix algebra") {
  const auto [p, q] = planar_pair(0.4);
  const SpanAlgebra alg = SpanAlgebra::span_closure({p.matrix(), q.matrix()});
  CHECK(minimality_check(alg, p));
  CHECK_FALSE(minimality_check(alg, ProjectionMatrix::identity(2)));

  Matrix outside = Matrix::Zero(3, 3);
  outside(0, 0) = 1.0;
  CHECK_THROWS_AS(minimality_check(alg, ProjectionMatrix(Matrix::Identity(3, 3))),
                  ValidationError);
  // A projection of the right size that is not in the algebra span:
  const SpanAlgebra corner = SpanAlgebra::span_closure({Matrix(p.matrix())});
  CHECK_THROWS_AS(minimality_check(corner, p.complement()), ValidationError);
}

TEST_CASE("extract_equivalent_minimals straddles a non-central projection") {
  const auto [pp, pq] = planar_pair(M_PI / 4);
  const SpanAlgebra alg = SpanAlgebra::span_closure({pp.matrix(), pq.matrix()});
  Matrix e11 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  const ProjectionMatrix p(e11);
  const auto pair = extract_equivalent_minimals(alg, p);
  REQUIRE(pair.has_value());
  CHECK(op_norm(pair->v * pair->v.adjoint() - pair->e.matrix()) < 1e-8);
  CHECK(op_norm(pair->v.adjoint() * pair->v - pair->f.matrix()) < 1e-8);
  // e <= p, f <= p⊥.
  CHECK(op_norm(p.matrix() * pair->e.matrix() - pair->e.matrix()) < 1e-8);
  CHECK(op_norm(p.matrix() * pair->f.matrix()) < 1e-8);
  CHECK(minimality_check(alg, pair->e));
  CHECK(minimality_check(alg, pair->f));
}

TEST_CASE("extract_equivalent_minimals returns nothing for central projections") {
  const SpanAlgebra alg =
      SpanAlgebra::span_closure({diag3(1, 1, 0), diag3(0, 0, 1)});
  CHECK_FALSE(
      extract_equivalent_minimals(alg, ProjectionMatrix(diag3(1, 1, 0))).has_value());
}

TEST_CASE("angle_audit covers all unordered pairs with consistent flags") {
  const auto [p, q] = planar_pair(M_PI / 3);
  const std::vector<ProjectionMatrix> family = {
      p, q, ProjectionMatrix::identity(2)};
  const Tolerance tol;
  const auto rows = angle_audit(family, tol);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].c_value == Catch::Approx(0.5).margin(1e-10));
  for (const auto& row : rows) {
    CHECK(row.i < row.j);
    CHECK(row.c_value ==
          Catch::Approx(angle_c(family[row.i], family[row.j])).margin(1e-12));
    CHECK(row.degenerate == (row.spectral_gap_at_1 < tol.cluster_tol));
    CHECK(row.spec_cardinality >= 1);
  }
  // p q p for the planar pair has spectrum {cos^2, 0} -> two clusters.
  CHECK(rows[0].spec_cardinality == 2);
}

TEST_CASE("closure dimension never exceeds the square bound") {
  std::mt19937_64 rng(1212);
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    std::vector<Matrix> gens;
    for (int g = 0; g < 3; ++g) gens.push_back(pt::random_complex(n, n, rng));
    CHECK(SpanAlgebra::span_closure(gens).dim() ==
          static_cast<std::size_t>(n * n));  // generic generators fill M_n
  }
}
