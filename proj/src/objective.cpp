#include "grassmin/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "grassmin/eigh.hpp"

namespace grassmin {

namespace {

void check_instance_dims(const SymMat& a, const SymMat& other, int m, const char* what) {
  if (a.dim() != other.dim())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch " +
                                std::to_string(a.dim()) + " vs " + std::to_string(other.dim()));
  if (m < 1 || m > a.dim() - 1)
    throw std::invalid_argument(std::string(what) + ": rank " + std::to_string(m) +
                                " out of range [1, " + std::to_string(a.dim() - 1) + "]");
}

void check_psd(const SymMat& a) {
  const double slack = 1e-10 * (1.0 + frob_norm(a));
  const SpectralDecomp s = eigh(a);
  if (s.eigenvalues.front() < -slack)
    throw std::invalid_argument("ProblemInstance: A is not positive semidefinite, lowest eigenvalue " +
                                std::to_string(s.eigenvalues.front()));
}

SymMat half_a_squared(const SymMat& a) {
  SymMat a2 = SymMat::from(a.mat() * a.mat());
  a2 *= 0.5;
  return a2;
}

}  // namespace

ProblemInstance ProblemInstance::from_AB(SymMat a, SymMat b, int m) {
  check_instance_dims(a, b, m, "ProblemInstance::from_AB");
  check_psd(a);
  ProblemInstance inst;
  inst.C = b - half_a_squared(a);
  inst.A = std::move(a);
  inst.B = std::move(b);
  inst.m = m;
  inst.M = inst.A.dim();
  return inst;
}

ProblemInstance ProblemInstance::from_AC(SymMat a, SymMat c, int m) {
  check_instance_dims(a, c, m, "ProblemInstance::from_AC");
  check_psd(a);
  ProblemInstance inst;
  inst.B = c + half_a_squared(a);
  inst.A = std::move(a);
  inst.C = std::move(c);
  inst.m = m;
  inst.M = inst.A.dim();
  return inst;
}

double cost(const ProblemInstance& inst, const SymMat& p) {
  check_same_shape(inst.B.mat(), p.mat(), "cost");
  const Mat ap = inst.A.mat() * p.mat();
  return frob_dot(inst.B.mat(), p.mat()) - 0.5 * frob_dot(ap, transpose(ap));
}

double relaxed_cost(const ProblemInstance& inst, const SymMat& d) {
  check_same_shape(inst.C.mat(), d.mat(), "relaxed_cost");
  const Mat ad = commutator(inst.A.mat(), d.mat());
  return frob_dot(inst.C.mat(), d.mat()) + 0.25 * frob_dot(ad, ad);
}

SymMat cost_grad(const ProblemInstance& inst, const SymMat& p) {
  check_same_shape(inst.B.mat(), p.mat(), "cost_grad");
  return inst.B - SymMat::from(inst.A.mat() * p.mat() * inst.A.mat());
}

SymMat relaxed_grad(const ProblemInstance& inst, const SymMat& d) {
  check_same_shape(inst.C.mat(), d.mat(), "relaxed_grad");
  const Mat inner = commutator(commutator(inst.A.mat(), d.mat()), inst.A.mat());
  return inst.C - SymMat::from(0.5 * inner);
}

double residual(const ProblemInstance& inst, const SymMat& p) {
  return frob_norm(commutator(cost_grad(inst, p).mat(), p.mat()));
}

}  // namespace grassmin
