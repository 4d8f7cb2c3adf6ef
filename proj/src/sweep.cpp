#include "srl/sweep.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace srl {

const char* to_string(SweepAxis::Quantity q) {
    switch (q) {
        case SweepAxis::Quantity::spacing: return "spacing";
        case SweepAxis::Quantity::pump: return "pump";
        case SweepAxis::Quantity::n_atoms: return "n_atoms";
    }
    return "unknown";
}

SweepAxis SweepAxis::log_spaced(Quantity q, double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) {
        throw std::invalid_argument("SweepAxis::log_spaced: need 0 < lo < hi and points >= 2");
    }
    SweepAxis axis;
    axis.quantity = q;
    axis.values.resize(static_cast<std::size_t>(points));
    const double step = (std::log(hi) - std::log(lo)) / (points - 1);
    for (int i = 0; i < points; ++i) {
        axis.values[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + i * step);
    }
    axis.values.front() = lo;
    axis.values.back() = hi;
    return axis;
}

SweepAxis SweepAxis::linear(Quantity q, double lo, double hi, int points) {
    if (!(hi > lo) || points < 2) {
        throw std::invalid_argument("SweepAxis::linear: need lo < hi and points >= 2");
    }
    SweepAxis axis;
    axis.quantity = q;
    axis.values.resize(static_cast<std::size_t>(points));
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        axis.values[static_cast<std::size_t>(i)] = lo + i * step;
    }
    axis.values.back() = hi;
    return axis;
}

SweepAxis SweepAxis::atom_numbers(int n_lo, int n_hi) {
    if (n_lo < 1 || n_hi < n_lo) {
        throw std::invalid_argument("SweepAxis::atom_numbers: need 1 <= n_lo <= n_hi");
    }
    SweepAxis axis;
    axis.quantity = Quantity::n_atoms;
    for (int n = n_lo; n <= n_hi; ++n) {
        axis.values.push_back(static_cast<double>(n));
    }
    return axis;
}

void SweepAxis::validate() const {
    if (values.empty()) {
        throw std::invalid_argument("SweepAxis: no grid points");
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) {
            throw std::invalid_argument("SweepAxis: values must be strictly increasing");
        }
    }
    for (double v : values) {
        if (quantity == Quantity::spacing && !(v > 0.0)) {
            throw std::invalid_argument("SweepAxis: spacing values must be positive");
        }
        if (quantity == Quantity::pump && v < 0.0) {
            throw std::invalid_argument("SweepAxis: pump values must be non-negative");
        }
        if (quantity == Quantity::n_atoms &&
            (v < 1.0 || std::abs(v - std::round(v)) > 1e-9)) {
            throw std::invalid_argument("SweepAxis: atom numbers must be positive integers");
        }
    }
}

namespace {

SweepRecord evaluate_point(const SweepTemplate& tpl, SweepAxis::Quantity quantity, double value,
                           const SweepOptions& options) {
    SweepRecord rec;
    rec.axis_value = value;
    rec.params = tpl.params;
    rec.spacing = tpl.spacing;
    switch (quantity) {
        case SweepAxis::Quantity::spacing: rec.spacing = value; break;
        case SweepAxis::Quantity::pump: rec.params.w = value; break;
        case SweepAxis::Quantity::n_atoms: rec.params.n_atoms = static_cast<int>(std::lround(value)); break;
    }
    try {
        CouplingMatrices cpl = build_couplings(equidistant_chain(rec.params.n_atoms, rec.spacing));
        if (!tpl.interactions) {
            cpl = disable_interactions(std::move(cpl));
        }
        const SteadyStateSolution sol = find_steady_state(rec.params, cpl, options.solver);
        rec.converged = sol.converged;
        rec.residual = sol.residual_norm;
        rec.iterations = sol.iterations;
        rec.method = sol.method;
        rec.photon_number = sol.state.photon_number;
        rec.populations = sol.state.populations;
        rec.pair_coherences = sol.state.atom_atom;
        if (!sol.converged) {
            rec.note = sol.failure;
            return rec;
        }
        if (options.compute_spectrum) {
            try {
                const RegressionSystem sys = build_regression(rec.params, cpl, sol);
                const SpectrumAnalysis analysis = analyze_spectrum(sys);
                rec.fwhm = analysis.line.fwhm;
                rec.center = analysis.line.center;
                rec.peak = analysis.line.peak;
                rec.spectrum_ok = true;
            } catch (const std::exception& ex) {
                rec.spectrum_ok = false;
                rec.note = ex.what();
            }
        }
    } catch (const std::exception& ex) {
        rec.converged = false;
        rec.note = ex.what();
    }
    return rec;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepTemplate& tpl, const SweepAxis& axis,
                                   const SweepOptions& options) {
    axis.validate();
    tpl.params.validate();
    const std::size_t count = axis.values.size();
    std::vector<SweepRecord> records(count);

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            records[i] = evaluate_point(tpl, axis.quantity, axis.values[i], options);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                records[i] = evaluate_point(tpl, axis.quantity, axis.values[i], options);
            }
        };
        std::vector<std::thread> pool;
        const int spawn = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
        pool.reserve(static_cast<std::size_t>(spawn));
        for (int t = 0; t < spawn; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    bool any_ok = false;
    for (const auto& rec : records) {
        any_ok = any_ok || rec.converged;
    }
    if (!any_ok) {
        throw std::runtime_error("run_sweep: every grid point failed");
    }
    return records;
}

namespace {

bool usable(const SweepRecord& rec, Objective objective) {
    if (!rec.converged) return false;
    if (objective == Objective::min_fwhm) {
        return rec.spectrum_ok && std::isfinite(rec.fwhm) && rec.fwhm > 0.0;
    }
    return std::isfinite(rec.photon_number);
}

double objective_value(const SweepRecord& rec, Objective objective) {
    return objective == Objective::max_photon ? rec.photon_number : rec.fwhm;
}

bool better(double candidate, double incumbent, Objective objective) {
    return objective == Objective::max_photon ? candidate > incumbent : candidate < incumbent;
}

}  // namespace

Optimum locate_optimum(const std::vector<SweepRecord>& records, Objective objective) {
    int best = -1;
    int first_valid = -1;
    int last_valid = -1;
    for (int i = 0; i < static_cast<int>(records.size()); ++i) {
        if (!usable(records[static_cast<std::size_t>(i)], objective)) continue;
        if (first_valid < 0) first_valid = i;
        last_valid = i;
        if (best < 0 || better(objective_value(records[static_cast<std::size_t>(i)], objective),
                               objective_value(records[static_cast<std::size_t>(best)], objective),
                               objective)) {
            best = i;
        }
    }
    if (best < 0) {
        throw std::runtime_error("locate_optimum: no converged records");
    }
    Optimum opt;
    opt.grid_index = best;
    opt.axis_value = records[static_cast<std::size_t>(best)].axis_value;
    opt.objective_value = objective_value(records[static_cast<std::size_t>(best)], objective);
    opt.interior = best != first_valid && best != last_valid;
    return opt;
}

Optimum refine_optimum(const std::vector<SweepRecord>& records, Objective objective,
                       const SweepTemplate& tpl, const SweepAxis& axis,
                       const SweepOptions& options, double rel_tol) {
    if (axis.quantity == SweepAxis::Quantity::n_atoms) {
        throw std::invalid_argument("refine_optimum: atom-number axis is discrete");
    }
    Optimum grid_opt = locate_optimum(records, objective);
    if (!grid_opt.interior) {
        return grid_opt;  // boundary optimum: nothing to bracket
    }

    // nearest usable neighbours bracket the extremum
    int lo = grid_opt.grid_index - 1;
    while (lo >= 0 && !usable(records[static_cast<std::size_t>(lo)], objective)) --lo;
    int hi = grid_opt.grid_index + 1;
    while (hi < static_cast<int>(records.size()) &&
           !usable(records[static_cast<std::size_t>(hi)], objective)) ++hi;
    if (lo < 0 || hi >= static_cast<int>(records.size())) {
        return grid_opt;
    }

    SweepOptions probe_options = options;
    probe_options.compute_spectrum = options.compute_spectrum || objective == Objective::min_fwhm;
    auto probe = [&](double value) {
        const SweepRecord rec = evaluate_point(tpl, axis.quantity, value, probe_options);
        if (!usable(rec, objective)) {
            return objective == Objective::max_photon ? -std::numeric_limits<double>::infinity()
                                                      : std::numeric_limits<double>::infinity();
        }
        return objective_value(rec, objective);
    };

    // golden section in log coordinates (the grids are log-spaced)
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(records[static_cast<std::size_t>(lo)].axis_value);
    double b = std::log(records[static_cast<std::size_t>(hi)].axis_value);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = probe(std::exp(x1));
    double f2 = probe(std::exp(x2));
    for (int it = 0; it < 80 && (b - a) > rel_tol; ++it) {
        if (better(f1, f2, objective)) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = probe(std::exp(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = probe(std::exp(x2));
        }
    }
    Optimum refined = grid_opt;
    const double xm = better(f1, f2, objective) ? x1 : x2;
    const double fm = better(f1, f2, objective) ? f1 : f2;
    if (std::isfinite(fm) && better(fm, grid_opt.objective_value, objective)) {
        refined.axis_value = std::exp(xm);
        refined.objective_value = fm;
    }
    return refined;
}

ScalingFit power_law_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) {
        throw std::invalid_argument("power_law_fit: need at least 3 points");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [n, v] : points) {
        if (!(n > 0.0) || !(v > 0.0)) {
            throw std::invalid_argument("power_law_fit: points must be positive");
        }
        const double x = std::log(n);
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double m = static_cast<double>(points.size());
    const double denom = m * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) {
        throw std::invalid_argument("power_law_fit: degenerate abscissae");
    }
    ScalingFit fit;
    fit.exponent = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / m;
    fit.prefactor = std::exp(intercept);
    double ss_res = 0.0;
    const double mean_y = sy / m;
    double ss_tot = 0.0;
    for (const auto& [n, v] : points) {
        const double y = std::log(v);
        const double fitted = intercept + fit.exponent * std::log(n);
        ss_res += (y - fitted) * (y - fitted);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return fit;
}

double extrapolate(const ScalingFit& fit, double n_target) {
    return fit.prefactor * std::pow(n_target, fit.exponent);
}

double density_from_spacing(double spacing, double wavelength_nm) {
    if (!(spacing > 0.0) || !(wavelength_nm > 0.0)) {
        throw std::invalid_argument("density_from_spacing: inputs must be positive");
    }
    const double r_cm = spacing * wavelength_nm * 1e-7;
    return 1.0 / (r_cm * r_cm * r_cm);
}

std::vector<CoherenceRow> coherence_decomposition(const SystemParams& base,
                                                  const SweepAxis& spacing_axis,
                                                  const SweepOptions& options, bool interactions) {
    if (spacing_axis.quantity != SweepAxis::Quantity::spacing) {
        throw std::invalid_argument("coherence_decomposition: spacing axis required");
    }
    SweepTemplate tpl;
    tpl.params = base;
    tpl.params.n_atoms = 3;
    tpl.interactions = interactions;
    SweepOptions opts = options;
    opts.compute_spectrum = false;
    const auto records = run_sweep(tpl, spacing_axis, opts);

    std::vector<CoherenceRow> rows;
    rows.reserve(records.size());
    for (const auto& rec : records) {
        CoherenceRow row;
        row.spacing = rec.axis_value;
        row.converged = rec.converged;
        if (rec.converged) {
            const double re12 = rec.pair_coherences[CumulantState::pair_index(0, 1, 3)].real();
            const double re13 = rec.pair_coherences[CumulantState::pair_index(0, 2, 3)].real();
            const double re23 = rec.pair_coherences[CumulantState::pair_index(1, 2, 3)].real();
            row.re_12 = re12;
            row.re_23 = re23;
            row.re_13 = re13;
            row.sum = re12 + re23 + re13;
            row.three_nn = 3.0 * re12;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace srl
