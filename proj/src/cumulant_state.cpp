#include "srl/cumulant_state.hpp"

#include <stdexcept>

#include "srl/params.hpp"

namespace srl {

void SystemParams::validate() const {
    if (n_atoms < 1) {
        throw std::invalid_argument("SystemParams: n_atoms must be >= 1");
    }
    if (g < 0.0 || kappa < 0.0 || w < 0.0) {
        throw std::invalid_argument("SystemParams: rates g, kappa, w must be non-negative");
    }
}

CumulantState CumulantState::zero(int n_atoms) {
    if (n_atoms < 1) {
        throw std::invalid_argument("CumulantState: n_atoms must be >= 1");
    }
    CumulantState st;
    st.populations = Eigen::VectorXd::Zero(n_atoms);
    st.atom_photon = Eigen::VectorXcd::Zero(n_atoms);
    st.atom_atom = Eigen::VectorXcd::Zero(n_pairs(n_atoms));
    st.photon_number = 0.0;
    return st;
}

int CumulantState::pair_index(int mu, int nu, int n) {
    if (mu < 0 || nu <= mu || nu >= n) {
        throw std::out_of_range("CumulantState::pair_index: need 0 <= mu < nu < n");
    }
    return mu * (2 * n - mu - 1) / 2 + (nu - mu - 1);
}

std::complex<double> CumulantState::pair(int mu, int nu) const {
    const int n = n_atoms();
    if (mu < nu) {
        return atom_atom[pair_index(mu, nu, n)];
    }
    return std::conj(atom_atom[pair_index(nu, mu, n)]);
}

Eigen::VectorXd CumulantState::pack() const {
    const int n = n_atoms();
    Eigen::VectorXd x(packed_size(n));
    for (int mu = 0; mu < n; ++mu) {
        x[mu] = populations[mu];
        x[n + 2 * mu] = atom_photon[mu].real();
        x[n + 2 * mu + 1] = atom_photon[mu].imag();
    }
    const int np = n_pairs(n);
    for (int p = 0; p < np; ++p) {
        x[3 * n + 2 * p] = atom_atom[p].real();
        x[3 * n + 2 * p + 1] = atom_atom[p].imag();
    }
    x[3 * n + 2 * np] = photon_number;
    return x;
}

CumulantState CumulantState::unpack(const Eigen::VectorXd& x, int n_atoms) {
    if (x.size() != packed_size(n_atoms)) {
        throw std::invalid_argument("CumulantState::unpack: packed size mismatch");
    }
    CumulantState st = zero(n_atoms);
    const int n = n_atoms;
    for (int mu = 0; mu < n; ++mu) {
        st.populations[mu] = x[mu];
        st.atom_photon[mu] = {x[n + 2 * mu], x[n + 2 * mu + 1]};
    }
    const int np = n_pairs(n);
    for (int p = 0; p < np; ++p) {
        st.atom_atom[p] = {x[3 * n + 2 * p], x[3 * n + 2 * p + 1]};
    }
    st.photon_number = x[3 * n + 2 * np];
    return st;
}

}  // namespace srl
