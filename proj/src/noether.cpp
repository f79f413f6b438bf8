#include "noether/noether.hpp"

namespace noether {

ConservationLaw lawFromComponents(const Expr& tau, const std::vector<Expr>& xi, const Hamiltonian& h,
                                  std::string provenance) {
  if (xi.size() != h.signature.n)
    throw ModelError("generator has " + std::to_string(xi.size()) + " state components, expected " +
                     std::to_string(h.signature.n));
  Expr c = Expr::constant(0.0);
  for (std::size_t i = 0; i < xi.size(); ++i) c = c + Expr::variable(costateName(i)) * xi[i];
  c = c - h.expr * tau;
  return {simplify(c), h.signature, std::move(provenance)};
}

ConservationLaw lawP1(const ControlProblem& p, const Generator& gen, std::string provenance) {
  return lawFromComponents(gen.tau, gen.xi, buildHamiltonianP1(p), std::move(provenance));
}

ConservationLaw lawP(const ControlProblem& p, const Generator& gen, std::string provenance) {
  return lawFromComponents(gen.tau, gen.xi, buildHamiltonianP(p), std::move(provenance));
}

}  // namespace noether
