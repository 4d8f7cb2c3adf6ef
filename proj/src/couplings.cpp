#include "srl/couplings.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace srl {

namespace {

constexpr double kSeriesThreshold = 1e-2;

double checked_cos2(double cos2) {
    // tolerate rounding overshoot from (d.r_hat)^2
    if (cos2 < -1e-12 || cos2 > 1.0 + 1e-12) {
        throw std::domain_error("kernel: cos2 outside [0, 1]");
    }
    return std::clamp(cos2, 0.0, 1.0);
}

}  // namespace

// The pair separation value is the kernel phase: a spacing of 4 separation
// units means k r = 4 between neighbours.  This is the same dimensionless
// separation the sweep axes and density conversion quote.
double kernel_phase_per_wavelength() { return 1.0; }

double decay_kernel_direct(double xi, double cos2) {
    const double c2 = checked_cos2(cos2);
    const double s = std::sin(xi);
    const double c = std::cos(xi);
    return 1.5 * ((1.0 - c2) * s / xi + (1.0 - 3.0 * c2) * (c / (xi * xi) - s / (xi * xi * xi)));
}

double decay_kernel_series(double xi, double cos2) {
    const double c2 = checked_cos2(cos2);
    const double xi2 = xi * xi;
    // sin(xi)/xi and cos(xi)/xi^2 - sin(xi)/xi^3 expanded about xi = 0;
    // the bracket tends to -1/3, which is what cancels in the direct form.
    double sinc = 0.0;
    double bracket = 0.0;
    double pow_xi2 = 1.0;            // xi^{2k}
    double fact = 1.0;               // (2k+1)!
    for (int k = 0; k <= 9; ++k) {
        if (k > 0) {
            pow_xi2 *= xi2;
            fact *= (2.0 * k) * (2.0 * k + 1.0);
        }
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        sinc += sign * pow_xi2 / fact;
        if (k >= 1) {
            // (-1)^k (2k) xi^{2k-2} / (2k+1)!
            bracket += sign * (2.0 * k) * (pow_xi2 / xi2) / fact;
        }
    }
    return 1.5 * ((1.0 - c2) * sinc + (1.0 - 3.0 * c2) * bracket);
}

double decay_kernel(double xi, double cos2) {
    if (xi < 0.0) {
        throw std::domain_error("decay_kernel: negative phase");
    }
    const double c2 = checked_cos2(cos2);
    if (xi == 0.0) {
        return 1.0;  // analytic limit, independent of the projection
    }
    return xi < kSeriesThreshold ? decay_kernel_series(xi, c2) : decay_kernel_direct(xi, c2);
}

double shift_kernel_direct(double xi, double cos2) {
    const double c2 = checked_cos2(cos2);
    const double s = std::sin(xi);
    const double c = std::cos(xi);
    return 0.75 * (-(1.0 - c2) * c / xi + (1.0 - 3.0 * c2) * (s / (xi * xi) + c / (xi * xi * xi)));
}

double shift_kernel_series(double xi, double cos2) {
    const double c2 = checked_cos2(cos2);
    const double xi2 = xi * xi;
    // cos(xi)/xi = 1/xi + sum_{k>=1} (-1)^k xi^{2k-1}/(2k)!
    double u = 1.0 / xi;
    // sin(xi)/xi^2 + cos(xi)/xi^3 = 1/xi^3 + 1/(2 xi)
    //                               + sum_{j>=1} (-1)^j (2j+1) xi^{2j-1}/(2j+2)!
    double v = 1.0 / (xi2 * xi) + 0.5 / xi;
    double pow_odd = xi;             // xi^{2k-1}
    double fact_even = 2.0;          // (2k)!
    for (int k = 1; k <= 9; ++k) {
        if (k > 1) {
            pow_odd *= xi2;
            fact_even *= (2.0 * k - 1.0) * (2.0 * k);
        }
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        u += sign * pow_odd / fact_even;
        v += sign * (2.0 * k + 1.0) * pow_odd / (fact_even * (2.0 * k + 1.0) * (2.0 * k + 2.0));
    }
    return 0.75 * (-(1.0 - c2) * u + (1.0 - 3.0 * c2) * v);
}

double shift_kernel(double xi, double cos2) {
    if (!(xi > 0.0)) {
        throw std::domain_error("shift_kernel: phase must be positive (coincident atoms)");
    }
    const double c2 = checked_cos2(cos2);
    return xi < kSeriesThreshold ? shift_kernel_series(xi, c2) : shift_kernel_direct(xi, c2);
}

CouplingMatrices build_couplings(const AtomGeometry& geometry) {
    geometry.validate();
    const int n = geometry.size();
    CouplingMatrices out;
    out.gamma = 1.0;
    out.decay = Eigen::MatrixXd::Identity(n, n);
    out.shift = Eigen::MatrixXd::Zero(n, n);
    const double phase_scale = kernel_phase_per_wavelength();
    for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
            const Eigen::Vector3d r = geometry.positions[nu] - geometry.positions[mu];
            const double dist = r.norm();
            const double proj = geometry.dipole.dot(r / dist);
            const double cos2 = proj * proj;
            const double xi = phase_scale * dist;
            const double f = decay_kernel(xi, cos2);
            const double g = shift_kernel(xi, cos2);
            out.decay(mu, nu) = f;
            out.decay(nu, mu) = f;
            out.shift(mu, nu) = g;
            out.shift(nu, mu) = g;
        }
    }
    return out;
}

CouplingMatrices disable_interactions(CouplingMatrices c) {
    const int n = c.size();
    c.decay = c.gamma * Eigen::MatrixXd::Identity(n, n);
    c.shift = Eigen::MatrixXd::Zero(n, n);
    return c;
}

}  // namespace srl
