#pragma once

#include <functional>

#include "srl/steady_state.hpp"

namespace srl {

// Linear regression system for the two-time correlation: generator M acts
// on (A, B_1 .. B_N) with steady-state populations frozen in; the initial
// vector is (n_ss, conj(<a^dag sigma_mu^->)_ss).  All eigenvalues of M must
// have negative real part or the spectrum is undefined.
struct RegressionSystem {
    Eigen::MatrixXcd generator;
    Eigen::VectorXcd initial;
    Eigen::VectorXcd eigenvalues;
};

RegressionSystem build_regression(const SystemParams& params, const CouplingMatrices& couplings,
                                  const SteadyStateSolution& steady);

struct GridMeta {
    double center = 0.0;
    double half_width = 0.0;
    int points = 0;
    int rounds = 0;
};

struct Spectrum {
    Eigen::VectorXd nu;  // frequency, units of gamma
    Eigen::VectorXd s;   // spectral density
    GridMeta meta;
};

// Continuous resolvent evaluation S(nu) = -(1/pi) Re[(M + i nu I)^{-1} x0]_0.
double spectral_density(const RegressionSystem& sys, double nu);

Spectrum spectrum_resolvent(const RegressionSystem& sys, const Eigen::VectorXd& nu_grid);

// A(t) = [exp(M t) x0]_0 sampled on a uniform grid; t_max is extended until
// the correlation has decayed below 1e-8 of A(0).
struct CorrelationSeries {
    Eigen::VectorXd t;
    Eigen::VectorXcd a;
};
CorrelationSeries correlation_time_series(const RegressionSystem& sys, double t_max, double dt);

struct LineshapeSummary {
    double fwhm = 0.0;
    double center = 0.0;
    double peak = 0.0;
};

// Peak from grid argmax plus parabolic refinement; half-maximum crossings
// bisected on the continuous function to 1e-8 relative in nu.  Throws when
// the peak is not interior or the half maximum is not bracketed.
LineshapeSummary lineshape(const Spectrum& spectrum,
                           const std::function<double(double)>& continuous);

// Default grid centered on the slowest mode, +-20 estimated widths, 4001
// points, with adaptive re-centering / widening / zooming.
struct SpectrumAnalysis {
    Spectrum spectrum;
    LineshapeSummary line;
};
SpectrumAnalysis analyze_spectrum(const RegressionSystem& sys);

}  // namespace srl
