#include "srl/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace srl {

void AtomGeometry::validate() const {
    if (positions.empty()) {
        throw std::invalid_argument("AtomGeometry: no atoms");
    }
    if (std::abs(dipole.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("AtomGeometry: dipole orientation is not a unit vector");
    }
    const int n = size();
    for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
            if ((positions[mu] - positions[nu]).norm() <= 0.0) {
                throw std::invalid_argument("AtomGeometry: atoms " + std::to_string(mu) + " and " +
                                            std::to_string(nu) + " coincide");
            }
        }
    }
}

AtomGeometry equidistant_chain(int n_atoms, double spacing) {
    if (n_atoms < 1) {
        throw std::invalid_argument("equidistant_chain: need at least one atom");
    }
    if (n_atoms > 1 && !(spacing > 0.0)) {
        throw std::invalid_argument("equidistant_chain: spacing must be positive");
    }
    AtomGeometry geom;
    geom.positions.reserve(static_cast<std::size_t>(n_atoms));
    for (int i = 0; i < n_atoms; ++i) {
        geom.positions.emplace_back(i * spacing, 0.0, 0.0);
    }
    geom.dipole = Eigen::Vector3d(0.0, 0.0, 1.0);
    return geom;
}

}  // namespace srl
