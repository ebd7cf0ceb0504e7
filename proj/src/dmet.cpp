#include "grassmin/dmet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "grassmin/eigh.hpp"

namespace grassmin {

namespace {

double default_frame_tol(const SymMat& gamma, double frame_tol) {
  return frame_tol > 0.0 ? frame_tol : 1e-10 * std::max(frob_norm(gamma), 1.0);
}

}  // namespace

BathSpec BathSpec::build(SymMat gamma, std::vector<int> fragment) {
  const int l_total = gamma.dim();
  std::sort(fragment.begin(), fragment.end());
  fragment.erase(std::unique(fragment.begin(), fragment.end()), fragment.end());
  const int l = static_cast<int>(fragment.size());
  if (l < 1 || l > l_total - 2)
    throw std::invalid_argument("BathSpec: fragment size " + std::to_string(l) +
                                " out of range [1, " + std::to_string(l_total - 2) + "]");
  for (int idx : fragment)
    if (idx < 0 || idx >= l_total)
      throw std::invalid_argument("BathSpec: fragment index " + std::to_string(idx) +
                                  " out of range [0, " + std::to_string(l_total - 1) + "]");

  validate_rdm(gamma);

  BathSpec spec;
  spec.fragment = std::move(fragment);
  spec.exterior.reserve(static_cast<std::size_t>(l_total - l));
  std::size_t fpos = 0;
  for (int i = 0; i < l_total; ++i) {
    if (fpos < spec.fragment.size() && spec.fragment[fpos] == i) {
      ++fpos;
    } else {
      spec.exterior.push_back(i);
    }
  }

  const int m_ext = static_cast<int>(spec.exterior.size());
  Mat gf(l, l), ge(m_ext, m_ext), ef(m_ext, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) gf(i, j) = gamma(spec.fragment[static_cast<std::size_t>(i)],
                                                 spec.fragment[static_cast<std::size_t>(j)]);
  for (int i = 0; i < m_ext; ++i)
    for (int j = 0; j < m_ext; ++j) ge(i, j) = gamma(spec.exterior[static_cast<std::size_t>(i)],
                                                     spec.exterior[static_cast<std::size_t>(j)]);
  for (int i = 0; i < m_ext; ++i)
    for (int j = 0; j < l; ++j) ef(i, j) = gamma(spec.exterior[static_cast<std::size_t>(i)],
                                                 spec.fragment[static_cast<std::size_t>(j)]);

  spec.gamma_frag = SymMat::from(gf);
  spec.gamma_ext = SymMat::from(ge);
  spec.offset = frob_dot(ef, ef);
  spec.ext_frag = std::move(ef);
  spec.gamma = std::move(gamma);
  return spec;
}

RdmDiagnostics validate_rdm(const SymMat& gamma, double expected_trace) {
  const SpectralDecomp s = eigh(gamma);
  RdmDiagnostics d;
  d.min_eigenvalue = s.eigenvalues.front();
  d.max_eigenvalue = s.eigenvalues.back();
  d.trace = trace(gamma);
  d.idempotency = frob_norm(gamma.mat() * gamma.mat() - gamma.mat());
  d.slater = d.idempotency <= 1e-8;

  const double tol = 1e-10 * (1.0 + frob_norm(gamma));
  if (d.min_eigenvalue < -tol || d.max_eigenvalue > 1.0 + tol)
    throw std::invalid_argument("validate_rdm: Pauli constraint violated, spectrum [" +
                                std::to_string(d.min_eigenvalue) + ", " +
                                std::to_string(d.max_eigenvalue) + "]");
  if (expected_trace >= 0.0 && std::fabs(d.trace - expected_trace) > 1e-8 * (1.0 + expected_trace))
    throw std::invalid_argument("validate_rdm: trace " + std::to_string(d.trace) +
                                " does not match expected " + std::to_string(expected_trace));
  return d;
}

ProblemInstance build_bath_problem(const BathSpec& spec, int m) {
  const int m_ext = spec.ext_dim();
  if (m < 1 || m > m_ext - 1)
    throw std::invalid_argument("build_bath_problem: bath dimension " + std::to_string(m) +
                                " out of range [1, " + std::to_string(m_ext - 1) + "]");
  const Mat coupling = spec.ext_frag * transpose(spec.ext_frag);  // gamma_ext,frag gamma_frag,ext
  const SymMat b = SymMat::from(0.5 * (spec.gamma_ext.mat() * spec.gamma_ext.mat() - coupling));
  ProblemInstance inst = ProblemInstance::from_AB(spec.gamma_ext, b, m);

  // C must come out as -coupling/2 (automatically <= 0)
  const double c_defect = frob_norm(inst.C.mat() + 0.5 * coupling);
  if (c_defect > 1e-10 * (1.0 + frob_norm(inst.C)))
    throw std::runtime_error("build_bath_problem: C != -coupling/2 (defect " +
                             std::to_string(c_defect) + ")");
  return inst;
}

double cluster_cost(const BathSpec& spec, const GrassmannPoint& p) {
  if (p.dim != spec.ext_dim())
    throw std::invalid_argument("cluster_cost: bath projector dim " + std::to_string(p.dim) +
                                " != exterior dim " + std::to_string(spec.ext_dim()));
  const ProblemInstance inst = build_bath_problem(spec, p.rank);
  const double reduced = 2.0 * cost(inst, p.P) + spec.offset;

  // direct route: |Pi gamma Pi_perp|^2 with Pi = diag(I_l, P)
  const int l_total = spec.L();
  const int l = spec.frag_dim();
  Mat pi(l_total, l_total);
  for (int i = 0; i < l; ++i) pi(spec.fragment[static_cast<std::size_t>(i)],
                                 spec.fragment[static_cast<std::size_t>(i)]) = 1.0;
  for (int i = 0; i < p.dim; ++i)
    for (int j = 0; j < p.dim; ++j)
      pi(spec.exterior[static_cast<std::size_t>(i)], spec.exterior[static_cast<std::size_t>(j)]) =
          p.P(i, j);
  const Mat pg = pi * spec.gamma.mat();
  const Mat pgq = pg - pg * pi;
  const double direct = frob_dot(pgq, pgq);

  const double tol = 1e-9 * (1.0 + std::fabs(direct));
  if (std::fabs(direct - reduced) > tol)
    throw std::runtime_error("cluster_cost: direct and reduced evaluations disagree (" +
                             std::to_string(direct) + " vs " + std::to_string(reduced) + ")");
  return direct;
}

BathDimension min_bath_dimension(const BathSpec& spec, double eig_tol, double frame_tol) {
  const double ftol = default_frame_tol(spec.gamma, frame_tol);
  const SpectralDecomp s = eigh(spec.gamma);
  const int l_total = spec.L();
  const int l = spec.frag_dim();

  // group eigenvalues into clusters by gap, drop the zero cluster
  std::vector<std::pair<int, int>> clusters;  // [lo, hi] inclusive
  int lo = 0;
  for (int i = 1; i <= l_total; ++i) {
    if (i == l_total ||
        s.eigenvalues[static_cast<std::size_t>(i)] - s.eigenvalues[static_cast<std::size_t>(i - 1)] > eig_tol) {
      clusters.emplace_back(lo, i - 1);
      lo = i;
    }
  }

  // fragment basis embedded in R^L
  Mat frag_basis(l_total, l);
  for (int j = 0; j < l; ++j) frag_basis(spec.fragment[static_cast<std::size_t>(j)], j) = 1.0;

  // accumulate [E_frag | P_1 E_frag | ... | P_s E_frag]
  std::vector<Mat> blocks;
  blocks.push_back(frag_basis);
  for (const auto& [c_lo, c_hi] : clusters) {
    double level = 0.0;
    for (int i = c_lo; i <= c_hi; ++i) level += s.eigenvalues[static_cast<std::size_t>(i)];
    level /= (c_hi - c_lo + 1);
    if (level <= eig_tol) continue;  // kernel cluster contributes nothing
    const SymMat proj = s.projector(c_lo, c_hi + 1);
    blocks.push_back(proj.mat() * frag_basis);
  }

  int total_cols = 0;
  for (const Mat& b : blocks) total_cols += b.cols();
  Mat stacked(l_total, total_cols);
  int col = 0;
  for (const Mat& b : blocks) {
    for (int j = 0; j < b.cols(); ++j, ++col)
      for (int i = 0; i < l_total; ++i) stacked(i, col) = b(i, j);
  }

  BathDimension out;
  out.cluster_basis = column_space(stacked, ftol);
  out.min_bath = out.cluster_basis.cols() - l;
  return out;
}

Mat slater_bath_qr(const BathSpec& spec, double frame_tol) {
  const RdmDiagnostics diag = validate_rdm(spec.gamma);
  if (!diag.slater)
    throw std::invalid_argument("slater_bath_qr: gamma is not idempotent (|g^2-g| = " +
                                std::to_string(diag.idempotency) + "); Slater input required");
  const double ftol = default_frame_tol(spec.gamma, frame_tol);

  // bath = orthonormalized ext components of gamma e_j, j in the
  // fragment; their numerical rank decides the bath dimension
  const Mat bath_ext = column_space(spec.ext_frag, ftol);
  const int l_total = spec.L();
  const int l = spec.frag_dim();
  const int m_bath = bath_ext.cols();

  Mat basis(l_total, l + m_bath);
  for (int j = 0; j < l; ++j) basis(spec.fragment[static_cast<std::size_t>(j)], j) = 1.0;
  for (int j = 0; j < m_bath; ++j)
    for (int i = 0; i < spec.ext_dim(); ++i)
      basis(spec.exterior[static_cast<std::size_t>(i)], l + j) = bath_ext(i, j);
  return basis;
}

}  // namespace grassmin
