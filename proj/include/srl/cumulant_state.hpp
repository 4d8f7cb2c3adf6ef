#pragma once

#include <complex>

#include <Eigen/Dense>

namespace srl {

// Second-order cumulant variables of the driven atom-cavity system:
//   populations[mu]  = <sigma_mu^ee>
//   atom_photon[mu]  = <a^dag sigma_mu^->
//   atom_atom[p]     = <sigma_mu^+ sigma_nu^-> for mu < nu, lexicographic
//   photon_number    = <a^dag a>
// The nu > mu coherences are never stored; they follow by conjugation.
//
// Packed real layout (fixed; used by the Jacobian and serialization):
// populations, then (Re, Im) of each atom-photon coherence by atom index,
// then (Re, Im) of each atom-atom coherence in lexicographic (mu, nu)
// order, then the photon number.  Real dimension: 3N + N(N-1) + 1.
struct CumulantState {
    Eigen::VectorXd populations;
    Eigen::VectorXcd atom_photon;
    Eigen::VectorXcd atom_atom;
    double photon_number = 0.0;

    static CumulantState zero(int n_atoms);

    int n_atoms() const { return static_cast<int>(populations.size()); }

    static int n_pairs(int n) { return n * (n - 1) / 2; }
    static int packed_size(int n) { return 3 * n + n * (n - 1) + 1; }

    // Index of the stored pair (mu, nu), mu < nu.
    static int pair_index(int mu, int nu, int n);

    // <sigma_mu^+ sigma_nu^-> for any mu != nu (conjugated when mu > nu).
    std::complex<double> pair(int mu, int nu) const;

    Eigen::VectorXd pack() const;
    static CumulantState unpack(const Eigen::VectorXd& x, int n_atoms);
};

}  // namespace srl
