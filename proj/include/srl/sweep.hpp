#pragma once

#include <string>
#include <vector>

#include "srl/spectrum.hpp"

namespace srl {

struct SweepAxis {
    enum class Quantity { spacing, pump, n_atoms };
    Quantity quantity = Quantity::spacing;
    std::vector<double> values;  // strictly increasing

    static SweepAxis log_spaced(Quantity q, double lo, double hi, int points);
    static SweepAxis linear(Quantity q, double lo, double hi, int points);
    static SweepAxis atom_numbers(int n_lo, int n_hi);
    void validate() const;
};

const char* to_string(SweepAxis::Quantity q);

// Base configuration a sweep perturbs: equidistant chain of params.n_atoms
// atoms at `spacing`, interactions optionally removed.
struct SweepTemplate {
    SystemParams params;
    double spacing = 4.0;
    bool interactions = true;
};

struct SweepRecord {
    double axis_value = 0.0;
    SystemParams params;
    double spacing = 0.0;
    bool converged = false;
    double residual = 0.0;
    int iterations = 0;
    SolveMethod method = SolveMethod::newton;
    double photon_number = 0.0;
    Eigen::VectorXd populations;
    Eigen::VectorXcd pair_coherences;
    bool spectrum_ok = false;
    double fwhm = 0.0;
    double center = 0.0;
    double peak = 0.0;
    std::string note;  // failure detail for flagged points
};

struct SweepOptions {
    bool compute_spectrum = false;
    int jobs = 1;
    SolverOptions solver;
};

// One record per axis value, ordered by axis value regardless of execution
// order; failed points are flagged, never dropped.  Throws only when every
// point fails.
std::vector<SweepRecord> run_sweep(const SweepTemplate& tpl, const SweepAxis& axis,
                                   const SweepOptions& options = {});

enum class Objective { max_photon, min_fwhm };

struct Optimum {
    double axis_value = 0.0;
    double objective_value = 0.0;
    bool interior = false;
    int grid_index = -1;
};

Optimum locate_optimum(const std::vector<SweepRecord>& records, Objective objective);

// Golden-section refinement inside the bracketing grid interval; each probe
// re-invokes the solver (and the spectrum pipeline for min_fwhm).  Only
// meaningful for continuous axes.
Optimum refine_optimum(const std::vector<SweepRecord>& records, Objective objective,
                       const SweepTemplate& tpl, const SweepAxis& axis,
                       const SweepOptions& options, double rel_tol = 1e-3);

struct ScalingFit {
    double exponent = 0.0;
    double prefactor = 0.0;  // value at N = 1
    double r_squared = 0.0;
};

// Least-squares line in (log N, log value); every value must be positive.
ScalingFit power_law_fit(const std::vector<std::pair<double, double>>& points);

double extrapolate(const ScalingFit& fit, double n_target);

// Simple-cubic density for a given spacing (units of the wavelength) and
// wavelength in nanometres; result in atoms per cm^3.
double density_from_spacing(double spacing, double wavelength_nm);

// Per-pair steady coherences for the three-atom chain across a spacing
// axis, with their sum and three times the nearest-neighbour value.
struct CoherenceRow {
    double spacing = 0.0;
    double re_12 = 0.0;
    double re_23 = 0.0;
    double re_13 = 0.0;
    double sum = 0.0;
    double three_nn = 0.0;
    bool converged = false;
};
std::vector<CoherenceRow> coherence_decomposition(const SystemParams& base,
                                                  const SweepAxis& spacing_axis,
                                                  const SweepOptions& options = {},
                                                  bool interactions = true);

}  // namespace srl
