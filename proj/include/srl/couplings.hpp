#pragma once

#include <Eigen/Dense>

#include "srl/geometry.hpp"

namespace srl {

// Pairwise collective decay (F) and frequency-shift (G) matrices, both in
// units of the single-atom decay rate gamma.  F carries gamma on the
// diagonal; the diagonal of G is zero because the self-shift never enters
// the dynamics.
struct CouplingMatrices {
    Eigen::MatrixXd decay;
    Eigen::MatrixXd shift;
    double gamma = 1.0;

    int size() const { return static_cast<int>(decay.rows()); }
};

// Decay kernel F(xi): xi is the dimensionless pair phase, cos2 = (d.r_hat)^2.
// F(0) = gamma exactly, independent of the dipole projection.
double decay_kernel(double xi, double cos2);

// Shift kernel G(xi): diverges as 1/xi^3 at zero separation, so xi must be
// strictly positive.
double shift_kernel(double xi, double cos2);

// Both kernels cancel catastrophically below xi ~ 1e-2 when evaluated from
// the trigonometric form, so a Taylor series takes over there.  The two
// routes are exposed separately for consistency checks.
double decay_kernel_direct(double xi, double cos2);
double decay_kernel_series(double xi, double cos2);
double shift_kernel_direct(double xi, double cos2);
double shift_kernel_series(double xi, double cos2);

// Phase accumulated per unit inter-atomic distance (distance in units of
// the transition wavelength).
double kernel_phase_per_wavelength();

CouplingMatrices build_couplings(const AtomGeometry& geometry);

// Noninteracting baseline: zero every off-diagonal decay entry and every
// shift entry, keeping the single-atom decay diagonal.
CouplingMatrices disable_interactions(CouplingMatrices c);

}  // namespace srl
