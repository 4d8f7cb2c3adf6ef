#pragma once

#include <complex>
#include <optional>
#include <string>

#include "srl/dynamics.hpp"

namespace srl {

enum class SolveMethod { newton, integrate_then_newton, integrate_only };

const char* to_string(SolveMethod m);

struct SolverOptions {
    double tolerance = 1e-10;         // scaled residual target
    int max_newton_iterations = 80;
    int max_integrator_steps = 40000;
    std::optional<Eigen::VectorXd> initial_guess;  // packed coordinates
};

struct SteadyStateSolution {
    CumulantState state;
    double residual_norm = 0.0;       // re-evaluated after solver exit
    SolveMethod method = SolveMethod::newton;
    int iterations = 0;
    bool converged = false;
    std::string failure;              // empty on success
};

// Algebraic fixed point of the single-atom system (no dipole-dipole terms);
// requires delta = 0 and n_atoms = 1.
struct SingleAtomFixedPoint {
    double population;
    double photon_number;
    std::complex<double> atom_photon;
};
SingleAtomFixedPoint single_atom_closed_form(const SystemParams& params);

// max_i |r_i| / (1 + |x_i|); photon numbers span many decades, so a plain
// norm would be meaningless.
double scaled_residual_norm(const Eigen::VectorXd& rhs_value, const Eigen::VectorXd& state);

// Default start: the interaction-free single-atom fixed point replicated
// over the array, all coherences zero.
Eigen::VectorXd default_initial_guess(const SystemParams& params);

// Damped Newton on the algebraic system; on stagnation fall back to
// backward-Euler integration until the residual is small enough to re-enter
// Newton.  Never throws for non-convergence: the failure is reported in the
// returned record.
SteadyStateSolution find_steady_state(const SystemParams& params, const CouplingMatrices& couplings,
                                      const SolverOptions& options = {});

}  // namespace srl
