#pragma once

#include "srl/couplings.hpp"
#include "srl/cumulant_state.hpp"
#include "srl/params.hpp"

namespace srl {

// Time derivative of the cumulant variables (time in units of 1/gamma).
// Populations and photon number evolve with exactly real derivatives; the
// unstored nu > mu coherences never enter except through conjugation.
CumulantState rhs(const CumulantState& state, const SystemParams& params,
                  const CouplingMatrices& couplings);

// Same derivative over the packed real coordinates.
Eigen::VectorXd packed_rhs(const Eigen::VectorXd& x, const SystemParams& params,
                           const CouplingMatrices& couplings);

// Exact Jacobian d(packed_rhs)/d(x) in the packed real coordinates.
Eigen::MatrixXd analytic_jacobian(const Eigen::VectorXd& x, const SystemParams& params,
                                  const CouplingMatrices& couplings);

}  // namespace srl
