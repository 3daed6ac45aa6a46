#ifndef PROJGEOM_EXTENSION_HPP
#define PROJGEOM_EXTENSION_HPP

#include "projgeom/two_projections.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace projgeom {

// Desk-scale model of an extension 0 -> K -> A -> C -> 0 with K a c0-sum of
// compacts and C finite-dimensional abelian.  Each block carries operators of
// the shape (scalar symbol) * I + (finite-rank part); the scalar is the
// block's image in the corona, which the model keeps central by construction.

enum class BlockKind { infinite, finite };

struct Block {
  std::string label;
  Eigen::Index dim = 0;        // truncation size
  BlockKind kind = BlockKind::infinite;
};

struct BlockSystem {
  std::vector<Block> blocks;
  std::vector<std::string> spectrum;  // spectrum points of the abelian part

  void validate() const {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (blocks[i].dim < 1)
        throw ValidationError("BlockSystem: truncation dims must be >= 1");
      for (std::size_t j = i + 1; j < blocks.size(); ++j)
        if (blocks[i].label == blocks[j].label)
          throw ValidationError("BlockSystem: duplicate block label " + blocks[i].label);
    }
    for (std::size_t i = 0; i < spectrum.size(); ++i)
      for (std::size_t j = i + 1; j < spectrum.size(); ++j)
        if (spectrum[i] == spectrum[j])
          throw ValidationError("BlockSystem: duplicate spectrum point " + spectrum[i]);
  }

  int block_index(const std::string& label) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i].label == label) return static_cast<int>(i);
    return -1;
  }
  int spectrum_index(const std::string& point) const {
    for (std::size_t i = 0; i < spectrum.size(); ++i)
      if (spectrum[i] == point) return static_cast<int>(i);
    return -1;
  }
};

/// Assignment telling each infinite block which spectrum point its scalar
/// symbol reads from.
struct BusbyMap {
  std::map<std::string, std::string> assignment;

  void validate(const BlockSystem& sys) const {
    for (const auto& [label, point] : assignment) {
      if (sys.block_index(label) < 0)
        throw ValidationError("BusbyMap: unknown block " + label);
      if (sys.spectrum_index(point) < 0)
        throw ValidationError("BusbyMap: unknown spectrum point " + point);
    }
    for (const auto& b : sys.blocks)
      if (b.kind == BlockKind::infinite && assignment.find(b.label) == assignment.end())
        throw ValidationError("BusbyMap: infinite block " + b.label + " unassigned");
  }
};

struct ScalarPlusFinite {
  Complex scalar{0.0, 0.0};
  Matrix finite;  // truncation-sized

  Matrix dense() const {
    return scalar * Matrix::Identity(finite.rows(), finite.cols()) + finite;
  }
};

/// Element of the modeled extension: per-block scalar-plus-finite multiplier
/// part tied to an abelian part through the Busby assignment.
struct ExtensionElement {
  std::vector<ScalarPlusFinite> blocks;  // aligned with BlockSystem::blocks
  std::vector<Complex> abelian;          // aligned with BlockSystem::spectrum
};

inline void validate_shape(const BlockSystem& sys, const ExtensionElement& el) {
  if (el.blocks.size() != sys.blocks.size())
    throw ValidationError("ExtensionElement: block count mismatch");
  if (el.abelian.size() != sys.spectrum.size())
    throw ValidationError("ExtensionElement: abelian size mismatch");
  for (std::size_t i = 0; i < sys.blocks.size(); ++i) {
    if (el.blocks[i].finite.rows() != sys.blocks[i].dim ||
        el.blocks[i].finite.cols() != sys.blocks[i].dim)
      throw ValidationError("ExtensionElement: block " + sys.blocks[i].label +
                            " has wrong truncation size");
    require_finite(el.blocks[i].finite, "ExtensionElement block");
    if (sys.blocks[i].kind == BlockKind::finite &&
        std::abs(el.blocks[i].scalar) > 0.0)
      throw ValidationError("ExtensionElement: finite block " + sys.blocks[i].label +
                            " must have zero scalar symbol");
  }
}

/// Compatibility pi(a) = tau(c): each assigned block's scalar equals the
/// abelian value at its spectrum point.
inline double compatibility_residual(const BlockSystem& sys, const BusbyMap& busby,
                                     const ExtensionElement& el) {
  validate_shape(sys, el);
  double worst = 0.0;
  for (const auto& [label, point] : busby.assignment) {
    const int bi = sys.block_index(label);
    const int si = sys.spectrum_index(point);
    worst = std::max(worst, std::abs(el.blocks[bi].scalar - el.abelian[si]));
  }
  return worst;
}

// --- pointwise *-algebra operations on elements --------------------------

inline ExtensionElement ext_add(const BlockSystem& sys, const ExtensionElement& a,
                                const ExtensionElement& b, Complex beta = 1.0) {
  validate_shape(sys, a);
  validate_shape(sys, b);
  ExtensionElement out = a;
  for (std::size_t i = 0; i < out.blocks.size(); ++i) {
    out.blocks[i].scalar += beta * b.blocks[i].scalar;
    out.blocks[i].finite += beta * b.blocks[i].finite;
  }
  for (std::size_t i = 0; i < out.abelian.size(); ++i)
    out.abelian[i] += beta * b.abelian[i];
  return out;
}

inline ExtensionElement ext_mul(const BlockSystem& sys, const ExtensionElement& a,
                                const ExtensionElement& b) {
  validate_shape(sys, a);
  validate_shape(sys, b);
  ExtensionElement out;
  out.blocks.reserve(a.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const auto& x = a.blocks[i];
    const auto& y = b.blocks[i];
    out.blocks.push_back({x.scalar * y.scalar,
                          x.scalar * y.finite + y.scalar * x.finite +
                              x.finite * y.finite});
  }
  for (std::size_t i = 0; i < a.abelian.size(); ++i)
    out.abelian.push_back(a.abelian[i] * b.abelian[i]);
  return out;
}

inline ExtensionElement ext_adjoint(const BlockSystem& sys, const ExtensionElement& a) {
  validate_shape(sys, a);
  ExtensionElement out = a;
  for (auto& blk : out.blocks) {
    blk.scalar = std::conj(blk.scalar);
    blk.finite = blk.finite.adjoint().eval();
  }
  for (auto& v : out.abelian) v = std::conj(v);
  return out;
}

inline double ext_norm(const BlockSystem& sys, const ExtensionElement& a) {
  validate_shape(sys, a);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    worst = std::max(worst, op_norm(a.blocks[i].dense()));
    if (sys.blocks[i].kind == BlockKind::infinite)
      worst = std::max(worst, std::abs(a.blocks[i].scalar));  // the tail
  }
  for (const auto& v : a.abelian) worst = std::max(worst, std::abs(v));
  return worst;
}

/// Checks the element is a projection: blockwise Hermitian idempotent with
/// 0/1 scalar symbols, abelian part 0/1.
inline void require_projection(const BlockSystem& sys, const ExtensionElement& el,
                               const Tolerance& tol = Tolerance{}) {
  validate_shape(sys, el);
  const double check_tol = std::min(tol.cluster_tol / 10.0, 1e-8);
  for (std::size_t i = 0; i < el.blocks.size(); ++i) {
    const Complex lam = el.blocks[i].scalar;
    if (std::min(std::abs(lam), std::abs(lam - 1.0)) > check_tol)
      throw ValidationError("extension projection: scalar symbol of block " +
                            sys.blocks[i].label + " not in {0,1}");
    const Matrix d = el.blocks[i].dense();
    if (op_norm(d - d.adjoint()) > check_tol || op_norm(d * d - d) > check_tol)
      throw ValidationError("extension projection: block " + sys.blocks[i].label +
                            " is not a Hermitian idempotent");
  }
  for (const auto& v : el.abelian)
    if (std::min(std::abs(v), std::abs(v - 1.0)) > check_tol)
      throw ValidationError("extension projection: abelian part not 0/1");
}

/// Builds a projection from 0/1 abelian bits routed through the Busby
/// assignment, optionally perturbed per block by a finite-rank Hermitian
/// that must keep the block idempotent.
inline ExtensionElement make_projection(
    const BlockSystem& sys, const BusbyMap& busby,
    const std::map<std::string, int>& abelian_bits,
    const std::map<std::string, Matrix>& perturbations = {},
    const Tolerance& tol = Tolerance{}) {
  sys.validate();
  busby.validate(sys);
  for (const auto& [point, bit] : abelian_bits) {
    if (sys.spectrum_index(point) < 0)
      throw ValidationError("make_projection: unknown spectrum point " + point);
    if (bit != 0 && bit != 1)
      throw ValidationError("make_projection: abelian bit must be 0 or 1");
  }
  for (const auto& s : sys.spectrum)
    if (abelian_bits.find(s) == abelian_bits.end())
      throw ValidationError("make_projection: missing bit for spectrum point " + s);

  ExtensionElement el;
  for (const auto& blk : sys.blocks) {
    ScalarPlusFinite part;
    part.finite = Matrix::Zero(blk.dim, blk.dim);
    if (blk.kind == BlockKind::infinite) {
      const auto& point = busby.assignment.at(blk.label);
      part.scalar = static_cast<double>(abelian_bits.at(point));
    }
    if (auto it = perturbations.find(blk.label); it != perturbations.end()) {
      if (it->second.rows() != blk.dim || it->second.cols() != blk.dim)
        throw ValidationError("make_projection: perturbation size mismatch for " +
                              blk.label);
      part.finite = it->second;
    }
    el.blocks.push_back(std::move(part));
  }
  for (const auto& s : sys.spectrum)
    el.abelian.push_back(static_cast<double>(abelian_bits.at(s)));
  require_projection(sys, el, tol);
  return el;
}

/// Max formula for the angle in the extension: blockwise angle on the
/// multiplier part; the abelian part is commutative and contributes zero.
inline double angle_in_extension(const BlockSystem& sys, const ExtensionElement& p1,
                                 const ExtensionElement& p2,
                                 const Tolerance& tol = Tolerance{}) {
  require_projection(sys, p1, tol);
  require_projection(sys, p2, tol);
  Tolerance relaxed = tol;
  relaxed.eq_tol = std::min(tol.cluster_tol / 10.0, 1e-8);
  double worst = 0.0;
  for (std::size_t i = 0; i < sys.blocks.size(); ++i) {
    const ProjectionMatrix a(p1.blocks[i].dense(), relaxed);
    const ProjectionMatrix b(p2.blocks[i].dense(), relaxed);
    worst = std::max(worst, angle_c(a, b, tol));
  }
  return worst;
}

struct LiftResult {
  ExtensionElement projection;       // the lifted projection p
  ExtensionElement selfadjoint_lift; // the self-adjoint a it was cut from
};

/// Projection lifting: per block form a = bit*I + noise and take the spectral
/// projection of a off the interval [-1/2, 1/2].  The result has scalar
/// symbols equal to the bits and differs from a by a finite-rank part.
inline LiftResult lift_projection(const BlockSystem& sys, const BusbyMap& busby,
                                  const std::map<std::string, int>& q_bits,
                                  const std::map<std::string, Matrix>& noise = {},
                                  const Tolerance& tol = Tolerance{}) {
  sys.validate();
  busby.validate(sys);
  for (const auto& [point, bit] : q_bits)
    if (bit != 0 && bit != 1)
      throw ValidationError("lift_projection: bits must be 0 or 1");
  for (const auto& s : sys.spectrum)
    if (q_bits.find(s) == q_bits.end())
      throw ValidationError("lift_projection: missing bit for spectrum point " + s);

  LiftResult out;
  for (const auto& blk : sys.blocks) {
    double bit = 0.0;
    if (blk.kind == BlockKind::infinite)
      bit = static_cast<double>(q_bits.at(busby.assignment.at(blk.label)));

    Matrix nz = Matrix::Zero(blk.dim, blk.dim);
    if (auto it = noise.find(blk.label); it != noise.end()) {
      if (it->second.rows() != blk.dim || it->second.cols() != blk.dim)
        throw ValidationError("lift_projection: noise size mismatch for " + blk.label);
      nz = it->second;
      if (op_norm(nz - nz.adjoint()) > tol.eq_tol)
        throw ValidationError("lift_projection: noise for " + blk.label +
                              " is not Hermitian");
      if (op_norm(nz) >= 0.5)
        throw ValidationError("lift_projection: noise norm for " + blk.label +
                              " must be < 1/2");
    }
    const Matrix a = bit * Matrix::Identity(blk.dim, blk.dim) + nz;
    const HermitianSpectrum hs = hermitian_eig((a + a.adjoint()) / 2.0, tol);
    for (Eigen::Index i = 0; i < hs.eigenvalues.size(); ++i) {
      const double lam = hs.eigenvalues(i);
      if (std::abs(std::abs(lam) - 0.5) < tol.cluster_tol)
        throw IllConditionedError("lift_projection: eigenvalue " + std::to_string(lam) +
                                  " of block " + blk.label +
                                  " too close to the spectral cut at ±1/2");
    }
    const Matrix p =
        spectral_projection(hs, [](double lam) { return std::abs(lam) > 0.5; });

    ScalarPlusFinite proj_part;
    proj_part.scalar = bit;
    proj_part.finite = p - bit * Matrix::Identity(blk.dim, blk.dim);
    out.projection.blocks.push_back(std::move(proj_part));

    ScalarPlusFinite lift_part;
    lift_part.scalar = bit;
    lift_part.finite = nz;
    out.selfadjoint_lift.blocks.push_back(std::move(lift_part));
  }
  for (const auto& s : sys.spectrum) {
    out.projection.abelian.push_back(static_cast<double>(q_bits.at(s)));
    out.selfadjoint_lift.abelian.push_back(static_cast<double>(q_bits.at(s)));
  }
  require_projection(sys, out.projection, tol);
  return out;
}

/// Decomposition P = compact + central with the central part carrying the
/// scalar symbols and the abelian part.
inline std::pair<ExtensionElement, ExtensionElement> decompose_projection(
    const BlockSystem& sys, const ExtensionElement& p,
    const Tolerance& tol = Tolerance{}) {
  require_projection(sys, p, tol);
  ExtensionElement compact, central;
  for (const auto& blk : p.blocks) {
    const double lam = std::round(blk.scalar.real());
    central.blocks.push_back(
        {lam, Matrix::Zero(blk.finite.rows(), blk.finite.cols())});
    compact.blocks.push_back({0.0, blk.dense() - lam * Matrix::Identity(
                                                           blk.finite.rows(),
                                                           blk.finite.cols())});
  }
  for (const auto& v : p.abelian) {
    central.abelian.push_back(std::round(v.real()));
    compact.abelian.push_back(0.0);
  }
  return {compact, central};
}

// --- forbidden family construction ---------------------------------------

struct EquivalentPair {
  ExtensionElement e;  // e <= p
  ExtensionElement f;  // f <= p⊥
  ExtensionElement v;  // v v* = e, v* v = f
};

struct ForbiddenScanRow {
  double c_k = 0.0;
  double ek_qk_norm = 0.0;  // ||e_k q_k||, should equal c_k
};

struct ForbiddenScanResult {
  std::vector<ForbiddenScanRow> rows;
  double c_pq = 0.0;             // angle of the assembled pair; = max c_k
  ExtensionElement q;
  ExtensionElement p1;           // p - sum e_k
  int p1_rank = 0;               // finite-part rank of p1 (plus nothing else)
  int meet_rank = 0;
  double meet_p1_gap = 0.0;      // ||meet(p,q) - p1|| blockwise dense
};

/// Assembles q = sum_k q_k + p1 with q_k = c^2 e + c s (v+v*) + s^2 f and
/// verifies the angle max formula and meet(p,q) = p1.
inline ForbiddenScanResult forbidden_family_scan(
    const BlockSystem& sys, const ExtensionElement& p,
    const std::vector<EquivalentPair>& pairs, const std::vector<double>& angles,
    const Tolerance& tol = Tolerance{}) {
  require_projection(sys, p, tol);
  if (pairs.size() != angles.size())
    throw ValidationError("forbidden_family_scan: pairs/angles size mismatch");
  if (pairs.empty())
    throw ValidationError("forbidden_family_scan: empty family");
  const double check_tol = std::min(tol.cluster_tol / 10.0, 1e-8);

  // Family conditions: subordination, equivalence, pairwise orthogonality.
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& pr = pairs[k];
    require_projection(sys, pr.e, tol);
    require_projection(sys, pr.f, tol);
    if (!(angles[k] >= 0.0 && angles[k] <= 1.0))
      throw ValidationError("forbidden_family_scan: c_k outside [0,1]");
    if (ext_norm(sys, ext_add(sys, ext_mul(sys, p, pr.e), pr.e, -1.0)) > check_tol)
      throw ValidationError("forbidden_family_scan: e_k not below p");
    if (ext_norm(sys, ext_mul(sys, p, pr.f)) > check_tol)
      throw ValidationError("forbidden_family_scan: f_k not below p⊥");
    const ExtensionElement vvs = ext_mul(sys, pr.v, ext_adjoint(sys, pr.v));
    const ExtensionElement vsv = ext_mul(sys, ext_adjoint(sys, pr.v), pr.v);
    if (ext_norm(sys, ext_add(sys, vvs, pr.e, -1.0)) > check_tol ||
        ext_norm(sys, ext_add(sys, vsv, pr.f, -1.0)) > check_tol)
      throw ValidationError("forbidden_family_scan: v_k does not implement e_k ~ f_k");
    for (std::size_t l = 0; l < k; ++l) {
      if (ext_norm(sys, ext_mul(sys, pr.e, pairs[l].e)) > check_tol ||
          ext_norm(sys, ext_mul(sys, pr.f, pairs[l].f)) > check_tol ||
          ext_norm(sys, ext_mul(sys, pr.e, pairs[l].f)) > check_tol ||
          ext_norm(sys, ext_mul(sys, pr.f, pairs[l].e)) > check_tol)
        throw ValidationError("forbidden_family_scan: family not pairwise orthogonal");
    }
  }

  ForbiddenScanResult out;
  ExtensionElement p1 = p;
  for (const auto& pr : pairs) p1 = ext_add(sys, p1, pr.e, -1.0);
  out.p1 = p1;

  ExtensionElement q = p1;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double c = angles[k], s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const auto& pr = pairs[k];
    // qk = c^2 e + c s (v + v*) + s^2 f.
    ExtensionElement qk = ext_add(sys, ext_mul(sys, pr.e, pr.e), pr.e, c * c - 1.0);
    qk = ext_add(sys, qk, pr.v, c * s);
    qk = ext_add(sys, qk, ext_adjoint(sys, pr.v), c * s);
    qk = ext_add(sys, qk, pr.f, s * s);
    q = ext_add(sys, q, qk);

    ForbiddenScanRow row;
    row.c_k = c;
    row.ek_qk_norm = ext_norm(sys, ext_mul(sys, pr.e, qk));
    out.rows.push_back(row);
  }
  out.q = q;
  require_projection(sys, q, tol);
  out.c_pq = angle_in_extension(sys, p, q, tol);

  Tolerance relaxed = tol;
  relaxed.eq_tol = std::min(tol.cluster_tol / 10.0, 1e-8);
  for (std::size_t i = 0; i < sys.blocks.size(); ++i) {
    const ProjectionMatrix bp(p.blocks[i].dense(), relaxed);
    const ProjectionMatrix bq(q.blocks[i].dense(), relaxed);
    const ProjectionMatrix bm = meet(bp, bq, tol);
    out.meet_rank += bm.rank();
    const ProjectionMatrix bp1(p1.blocks[i].dense(), relaxed);
    out.p1_rank += bp1.rank();
    out.meet_p1_gap =
        std::max(out.meet_p1_gap, op_norm(bm.matrix() - bp1.matrix()));
  }
  return out;
}

/// Elementary partial-isometry family inside one block: e_k on coordinate
/// k-1, f_k on coordinate p_rank+k-1, v_k the matrix unit between them.
/// p is the coordinate projection of rank p_rank in the chosen block.
inline std::pair<ExtensionElement, std::vector<EquivalentPair>> coordinate_family(
    const BlockSystem& sys, const BusbyMap& busby, const std::string& block_label,
    int p_rank, int family_size) {
  sys.validate();
  busby.validate(sys);
  const int bi = sys.block_index(block_label);
  if (bi < 0) throw ValidationError("coordinate_family: unknown block " + block_label);
  const Eigen::Index dim = sys.blocks[bi].dim;
  if (family_size < 1 || p_rank < family_size || p_rank + family_size > dim)
    throw ValidationError(
        "coordinate_family: need family_size <= p_rank and p_rank + family_size <= dim");

  auto blank = [&]() {
    ExtensionElement el;
    for (const auto& blk : sys.blocks)
      el.blocks.push_back({0.0, Matrix::Zero(blk.dim, blk.dim)});
    el.abelian.assign(sys.spectrum.size(), 0.0);
    return el;
  };

  ExtensionElement p = blank();
  for (int i = 0; i < p_rank; ++i) p.blocks[bi].finite(i, i) = 1.0;

  std::vector<EquivalentPair> pairs;
  for (int k = 0; k < family_size; ++k) {
    EquivalentPair pr{blank(), blank(), blank()};
    pr.e.blocks[bi].finite(k, k) = 1.0;
    pr.f.blocks[bi].finite(p_rank + k, p_rank + k) = 1.0;
    pr.v.blocks[bi].finite(k, p_rank + k) = 1.0;
    pairs.push_back(std::move(pr));
  }
  return {std::move(p), std::move(pairs)};
}

}  // namespace projgeom

#endif  // PROJGEOM_EXTENSION_HPP
