#pragma once

#include <vector>

#include <Eigen/Dense>

namespace srl {

// Atomic array geometry: positions in the dimensionless separation unit of
// the emission kernels (the phase k.r accumulated between two atoms equals
// their separation value), plus the common dipole orientation (unit vector).
struct AtomGeometry {
    std::vector<Eigen::Vector3d> positions;
    Eigen::Vector3d dipole{0.0, 0.0, 1.0};

    int size() const { return static_cast<int>(positions.size()); }

    // Throws std::invalid_argument on non-unit dipole or coincident atoms.
    void validate() const;
};

// Collinear chain along x with uniform nearest-neighbour spacing and the
// dipole perpendicular to the chain axis, so d.r_hat = 0 for every pair.
AtomGeometry equidistant_chain(int n_atoms, double spacing);

}  // namespace srl
