#include <stdexcept>
#include <string>

#include "grassmin/rng.hpp"
#include "grassmin/solvers.hpp"

namespace grassmin {

const char* to_string(LocalMethod m) {
  switch (m) {
    case LocalMethod::roothaan: return "roothaan";
    case LocalMethod::oda: return "oda";
    case LocalMethod::oda_convex: return "oda-convex";
    case LocalMethod::roothaan_tilde: return "roothaan-tilde";
    case LocalMethod::rgd: return "rgd";
    case LocalMethod::tr_grassmann: return "tr-grassmann";
    case LocalMethod::tr_stiefel: return "tr-stiefel";
  }
  return "unknown";
}

std::optional<LocalMethod> parse_method(const std::string& name) {
  if (name == "roothaan") return LocalMethod::roothaan;
  if (name == "oda") return LocalMethod::oda;
  if (name == "oda-convex") return LocalMethod::oda_convex;
  if (name == "roothaan-tilde") return LocalMethod::roothaan_tilde;
  if (name == "rgd") return LocalMethod::rgd;
  if (name == "tr-grassmann") return LocalMethod::tr_grassmann;
  if (name == "tr-stiefel") return LocalMethod::tr_stiefel;
  return std::nullopt;
}

SolveReport run_local(const ProblemInstance& inst, LocalMethod method, const GrassmannPoint& p0,
                      const SolverOptions& opts) {
  switch (method) {
    case LocalMethod::roothaan:
      return roothaan(inst, p0, opts);
    case LocalMethod::oda:
      return oda(inst, ConvexPoint::from_projector(p0), opts);
    case LocalMethod::oda_convex:
      return oda_convex(inst, ConvexPoint::from_projector(p0), opts);
    case LocalMethod::roothaan_tilde:
      return roothaan_tilde(inst, p0, opts);
    case LocalMethod::rgd:
      return riemannian_descent(inst, p0, opts);
    case LocalMethod::tr_grassmann:
      return trust_region_grassmann(inst, p0, opts);
    case LocalMethod::tr_stiefel:
      return trust_region_stiefel(inst, stiefel_lift(p0), opts);
  }
  throw std::invalid_argument("run_local: unknown method");
}

MultistartResult multistart(const ProblemInstance& inst, int n_starts, std::uint64_t seed,
                            LocalMethod method, const SolverOptions& opts) {
  if (n_starts < 1) throw std::invalid_argument("multistart: n_starts must be >= 1");

  MultistartResult out;
  out.all_J.reserve(static_cast<std::size_t>(n_starts));
  for (int k = 0; k < n_starts; ++k) {
    const GrassmannPoint p0 = random_grassmann(inst.M, inst.m, split_seed(seed, static_cast<std::uint64_t>(k)));
    SolveReport rep = run_local(inst, method, p0, opts);
    out.all_J.push_back(rep.final_objective);
    if (out.best_index < 0 || rep.final_objective < out.best.final_objective) {
      out.best = std::move(rep);
      out.best_index = k;
    }
  }
  return out;
}

}  // namespace grassmin
