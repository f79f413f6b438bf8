#pragma once

#include <string>
#include <vector>

#include "noether/model.hpp"
#include "noether/symmetry.hpp"

namespace noether {

/// C(t, x, u, [psi0], psi, lambda), constant along extremals of its problem form.
struct ConservationLaw {
  Expr expr;
  Signature signature;
  std::string provenance;

  ProblemForm form() const noexcept { return signature.form; }
};

/// psi . xi - H tau, simplified.
ConservationLaw lawFromComponents(const Expr& tau, const std::vector<Expr>& xi, const Hamiltonian& h,
                                  std::string provenance = {});

/// Law of a symmetry of the isoperimetric scalar problem.
ConservationLaw lawP1(const ControlProblem& p, const Generator& gen, std::string provenance = {});

/// Law of a symmetry of the vector-cost problem.
ConservationLaw lawP(const ControlProblem& p, const Generator& gen, std::string provenance = {});

}  // namespace noether
