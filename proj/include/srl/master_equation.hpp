#pragma once

#include <Eigen/Dense>

#include "srl/couplings.hpp"
#include "srl/params.hpp"

namespace srl {

// Truncated Hilbert space for the brute-force Lindblad solution: n_atoms
// two-level atoms tensor a Fock space cut at photon_cutoff.  Basis order is
// atom 0 (|g>, |e>) outermost, then atom 1, ..., field innermost.
struct TruncatedHilbert {
    int n_atoms = 1;
    int photon_cutoff = 3;

    int dim() const { return (1 << n_atoms) * (photon_cutoff + 1); }

    // Throws when the superoperator side dim()^2 would exceed 1e4.
    void validate() const;
};

// Full Liouvillian superoperator over column-major vectorized density
// matrices, in the frame rotating at the atomic frequency: Hamiltonian with
// detuning, coupling and collective shift G, plus repump, cavity-loss and
// collective-emission dissipators with the full decay matrix F.
Eigen::MatrixXcd build_liouvillian(const SystemParams& params, const CouplingMatrices& couplings,
                                   const TruncatedHilbert& space);

// Null vector of the superoperator, Hermitized and normalized to unit
// trace.  Throws when the null space is degenerate or the residual check
// fails.
Eigen::MatrixXcd steady_density_matrix(const Eigen::MatrixXcd& liouvillian);

struct ExactObservables {
    Eigen::VectorXd populations;        // <sigma_mu^ee>
    Eigen::VectorXcd pair_coherences;   // <sigma_mu^+ sigma_nu^->, mu < nu
    double photon_number = 0.0;
};

ExactObservables observables(const Eigen::MatrixXcd& rho, const TruncatedHilbert& space);

}  // namespace srl
