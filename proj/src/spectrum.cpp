#include "srl/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

namespace srl {

namespace {
using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};
}  // namespace

RegressionSystem build_regression(const SystemParams& params, const CouplingMatrices& cpl,
                                  const SteadyStateSolution& steady) {
    params.validate();
    if (!steady.converged) {
        throw std::invalid_argument("build_regression: steady state did not converge");
    }
    const int n = params.n_atoms;
    if (cpl.size() != n || steady.state.n_atoms() != n) {
        throw std::invalid_argument("build_regression: dimension mismatch");
    }
    const double gamma = cpl.gamma;
    const Eigen::MatrixXd& F = cpl.decay;
    const Eigen::MatrixXd& G = cpl.shift;

    RegressionSystem sys;
    sys.generator = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    sys.initial = Eigen::VectorXcd::Zero(n + 1);

    sys.generator(0, 0) = kI * params.delta - 0.5 * params.kappa;
    for (int mu = 0; mu < n; ++mu) {
        const double pop = steady.state.populations[mu];
        sys.generator(0, 1 + mu) = 0.5 * kI * params.g;
        sys.generator(1 + mu, 0) = -0.5 * kI * params.g * (2.0 * pop - 1.0);
        sys.generator(1 + mu, 1 + mu) = -0.5 * (params.w + gamma);
        for (int nu = 0; nu < n; ++nu) {
            if (nu == mu) continue;
            sys.generator(1 + mu, 1 + nu) = -0.5 * Complex(F(mu, nu), -2.0 * G(mu, nu)) * (1.0 - 2.0 * pop);
        }
    }
    sys.initial[0] = steady.state.photon_number;
    for (int mu = 0; mu < n; ++mu) {
        sys.initial[1 + mu] = std::conj(steady.state.atom_photon[mu]);
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sys.generator, /*computeEigenvectors=*/false);
    sys.eigenvalues = es.eigenvalues();
    for (Eigen::Index k = 0; k < sys.eigenvalues.size(); ++k) {
        if (sys.eigenvalues[k].real() >= 0.0) {
            std::ostringstream msg;
            msg << "build_regression: undamped mode, eigenvalue " << sys.eigenvalues[k].real()
                << (sys.eigenvalues[k].imag() >= 0 ? "+" : "") << sys.eigenvalues[k].imag()
                << "i has non-negative real part";
            throw std::runtime_error(msg.str());
        }
    }
    return sys;
}

double spectral_density(const RegressionSystem& sys, double nu) {
    Eigen::MatrixXcd shifted = sys.generator;
    shifted.diagonal().array() += kI * nu;
    const Eigen::VectorXcd z = Eigen::PartialPivLU<Eigen::MatrixXcd>(shifted).solve(sys.initial);
    return -z[0].real() / std::numbers::pi;
}

Spectrum spectrum_resolvent(const RegressionSystem& sys, const Eigen::VectorXd& nu_grid) {
    Spectrum spec;
    spec.nu = nu_grid;
    spec.s.resize(nu_grid.size());
    for (Eigen::Index i = 0; i < nu_grid.size(); ++i) {
        spec.s[i] = spectral_density(sys, nu_grid[i]);
    }
    spec.meta.points = static_cast<int>(nu_grid.size());
    if (nu_grid.size() > 1) {
        spec.meta.center = 0.5 * (nu_grid[0] + nu_grid[nu_grid.size() - 1]);
        spec.meta.half_width = 0.5 * (nu_grid[nu_grid.size() - 1] - nu_grid[0]);
    }
    return spec;
}

CorrelationSeries correlation_time_series(const RegressionSystem& sys, double t_max, double dt) {
    if (!(dt > 0.0) || !(t_max > 0.0)) {
        throw std::invalid_argument("correlation_time_series: need positive t_max and dt");
    }
    const Eigen::MatrixXcd propagator = (sys.generator * dt).exp();
    std::vector<Complex> samples;
    Eigen::VectorXcd x = sys.initial;
    samples.push_back(x[0]);
    const double a0 = std::abs(sys.initial[0]);
    long steps = std::lround(std::ceil(t_max / dt));
    const long hard_cap = 4'000'000;
    long done = 0;
    while (done < steps) {
        x = propagator * x;
        samples.push_back(x[0]);
        ++done;
        if (done == steps && a0 > 0.0 && std::abs(x[0]) > 1e-8 * a0 && 2 * steps <= hard_cap) {
            steps *= 2;  // not yet decayed; extend the window
        }
    }
    CorrelationSeries out;
    out.t.resize(static_cast<Eigen::Index>(samples.size()));
    out.a.resize(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out.t[static_cast<Eigen::Index>(i)] = static_cast<double>(i) * dt;
        out.a[static_cast<Eigen::Index>(i)] = samples[i];
    }
    return out;
}

namespace {

// parabolic vertex through three points around the grid argmax
double refine_peak(const Spectrum& spec, Eigen::Index j) {
    const double x0 = spec.nu[j - 1];
    const double x1 = spec.nu[j];
    const double x2 = spec.nu[j + 1];
    const double y0 = spec.s[j - 1];
    const double y1 = spec.s[j];
    const double y2 = spec.s[j + 1];
    const double d1 = (y1 - y0) / (x1 - x0);
    const double d2 = (y2 - y1) / (x2 - x1);
    const double curv = (d2 - d1) / (0.5 * (x2 - x0));
    if (!(curv < 0.0)) {
        return x1;
    }
    const double mid = 0.5 * (x0 + x1);
    const double vertex = mid - d1 / curv;
    return std::clamp(vertex, x0, x2);
}

double bisect_half_crossing(const std::function<double(double)>& f, double lo, double hi,
                            double half) {
    // keep f(lo) >= half >= f(hi) orientation-free via sign bookkeeping
    double flo = f(lo) - half;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid) - half;
        if ((fm >= 0.0) == (flo >= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        const double tol = 1e-13 * std::max({std::abs(lo), std::abs(hi), 1e-30});
        if (std::abs(hi - lo) <= tol) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

LineshapeSummary lineshape(const Spectrum& spec, const std::function<double(double)>& continuous) {
    const Eigen::Index m = spec.nu.size();
    if (m < 5) {
        throw std::invalid_argument("lineshape: spectrum has too few samples");
    }
    Eigen::Index j = 0;
    spec.s.maxCoeff(&j);
    if (j == 0 || j == m - 1) {
        throw std::runtime_error("lineshape: peak at grid edge; widen the grid");
    }
    const double center = refine_peak(spec, j);
    double peak = continuous(center);
    if (!(peak >= spec.s[j])) {
        peak = spec.s[j];
    }
    const double half = 0.5 * peak;

    Eigen::Index left = -1;
    for (Eigen::Index i = j; i-- > 0;) {
        if (spec.s[i] <= half) {
            left = i;
            break;
        }
    }
    Eigen::Index right = -1;
    for (Eigen::Index i = j + 1; i < m; ++i) {
        if (spec.s[i] <= half) {
            right = i;
            break;
        }
    }
    if (left < 0 || right < 0) {
        throw std::runtime_error("lineshape: half maximum not bracketed; widen the grid");
    }
    const double nu_left = bisect_half_crossing(continuous, spec.nu[left + 1], spec.nu[left], half);
    const double nu_right = bisect_half_crossing(continuous, spec.nu[right - 1], spec.nu[right], half);

    LineshapeSummary out;
    out.fwhm = nu_right - nu_left;
    out.center = center;
    out.peak = peak;
    if (!(out.fwhm > 0.0)) {
        throw std::runtime_error("lineshape: non-positive width");
    }
    return out;
}

SpectrumAnalysis analyze_spectrum(const RegressionSystem& sys) {
    // crude line estimate from the slowest mode; the initial window also
    // covers every other mode centre so the dominant line cannot be missed
    // when strong shifts split the spectrum
    Eigen::Index slow = 0;
    for (Eigen::Index k = 1; k < sys.eigenvalues.size(); ++k) {
        if (sys.eigenvalues[k].real() > sys.eigenvalues[slow].real()) {
            slow = k;
        }
    }
    double center = -sys.eigenvalues[slow].imag();
    double width = 2.0 * std::abs(sys.eigenvalues[slow].real());
    if (!(width > 0.0)) width = 1.0;
    double spread = 0.0;
    for (Eigen::Index k = 0; k < sys.eigenvalues.size(); ++k) {
        if (sys.eigenvalues[k].real() < -0.6 * sys.generator.cwiseAbs().maxCoeff()) {
            continue;  // far overdamped mode (the bare cavity); carries no line
        }
        spread = std::max(spread, std::abs(-sys.eigenvalues[k].imag() - center));
    }

    constexpr int kPoints = 4001;
    double span = 20.0 * width + spread;
    auto continuous = [&sys](double nu) { return spectral_density(sys, nu); };

    for (int round = 0; round < 18; ++round) {
        Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(kPoints, center - span, center + span);
        Spectrum spec = spectrum_resolvent(sys, grid);
        spec.meta.rounds = round + 1;
        Eigen::Index j = 0;
        spec.s.maxCoeff(&j);
        if (j == 0 || j == kPoints - 1) {
            center = spec.nu[j];
            span *= 4.0;
            continue;
        }
        try {
            LineshapeSummary line = lineshape(spec, continuous);
            // resolve the line properly before trusting the extraction
            const double cell = 2.0 * span / (kPoints - 1);
            if (line.fwhm < 12.0 * cell || line.fwhm < span / 40.0) {
                center = line.center;
                span = std::max(10.0 * line.fwhm, 1e-13 * std::abs(center));
                Eigen::VectorXd fine = Eigen::VectorXd::LinSpaced(kPoints, center - span, center + span);
                Spectrum zoomed = spectrum_resolvent(sys, fine);
                zoomed.meta.rounds = round + 2;
                line = lineshape(zoomed, continuous);
                return {zoomed, line};
            }
            return {spec, line};
        } catch (const std::runtime_error&) {
            center = spec.nu[j];
            span *= 4.0;
        }
    }
    throw std::runtime_error("analyze_spectrum: could not bracket the line");
}

}  // namespace srl
