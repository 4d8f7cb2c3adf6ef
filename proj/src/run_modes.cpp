#include "srl/run_modes.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "srl/master_equation.hpp"
#include "srl/output.hpp"
#include "srl/sweep.hpp"
#include "srl/version.hpp"

namespace srl {

namespace {

using nlohmann::json;

struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

AtomGeometry make_geometry(const RunConfig& cfg, int n_atoms, double spacing) {
    if (!cfg.geometry.positions.empty()) {
        AtomGeometry geom;
        geom.positions = cfg.geometry.positions;
        geom.dipole = cfg.geometry.dipole;
        geom.validate();
        return geom;
    }
    return equidistant_chain(n_atoms, spacing);
}

double require_spacing(const RunConfig& cfg) {
    if (cfg.geometry.positions.empty() && !cfg.geometry.spacing) {
        throw ConfigError(0, "[geometry] needs 'spacing' (or explicit 'positions') for this mode");
    }
    return cfg.geometry.spacing.value_or(0.0);
}

SolverOptions solver_options(const RunConfig& cfg) {
    SolverOptions opt;
    opt.tolerance = cfg.tolerance;
    opt.max_newton_iterations = cfg.max_iterations;
    return opt;
}

json params_echo(const RunConfig& cfg) {
    json j{{"n_atoms", cfg.params.n_atoms}, {"g", cfg.params.g},     {"kappa", cfg.params.kappa},
           {"w", cfg.params.w},             {"delta", cfg.params.delta}};
    if (cfg.gamma_hz) j["gamma_hz"] = *cfg.gamma_hz;
    return j;
}

// hash of the result-relevant configuration; output paths excluded so the
// same physics always carries the same provenance tag
std::string config_hash(const RunConfig& cfg) {
    std::string canon = canonical_config(cfg);
    if (const auto pos = canon.find("[output]"); pos != std::string::npos) {
        canon.resize(pos);
    }
    canon += std::string("mode = ") + to_string(cfg.mode) + "\n";
    return hash_hex(fnv1a_hash(canon));
}

json base_json(const RunConfig& cfg) {
    json j;
    j["version"] = kVersion;
    j["mode"] = to_string(cfg.mode);
    j["config_echo"] = params_echo(cfg);
    j["config_hash"] = config_hash(cfg);
    return j;
}

std::string artifact_path(const RunConfig& cfg, const std::string& suffix) {
    std::filesystem::path dir(cfg.output.dir);
    return (dir / (cfg.output.prefix + "_" + to_string(cfg.mode) + suffix)).string();
}

void provenance(CsvBuilder& csv, const RunConfig& cfg) {
    csv.comment(std::string("srl ") + kVersion + " schema " + kCsvSchemaVersion);
    csv.comment("mode " + std::string(to_string(cfg.mode)));
    csv.comment("config " + config_hash(cfg));
}

SweepAxis axis_from_config(const RunConfig& cfg) {
    SweepAxis::Quantity q;
    if (cfg.sweep.axis == "spacing") {
        q = SweepAxis::Quantity::spacing;
    } else if (cfg.sweep.axis == "pump") {
        q = SweepAxis::Quantity::pump;
    } else {
        q = SweepAxis::Quantity::n_atoms;
    }
    if (cfg.sweep.points < 1) {
        throw ConfigError(0, "[sweep] has no grid points");
    }
    if (q == SweepAxis::Quantity::n_atoms) {
        return SweepAxis::atom_numbers(static_cast<int>(cfg.sweep.min),
                                       static_cast<int>(cfg.sweep.max));
    }
    if (cfg.sweep.points == 1) {
        throw ConfigError(0, "[sweep] needs at least two grid points");
    }
    return cfg.sweep.scale == "log"
               ? SweepAxis::log_spaced(q, cfg.sweep.min, cfg.sweep.max, cfg.sweep.points)
               : SweepAxis::linear(q, cfg.sweep.min, cfg.sweep.max, cfg.sweep.points);
}

// ---- steady ----

void run_steady(const RunConfig& cfg, int, CsvBuilder& csv, json& j) {
    SystemParams params = cfg.params;
    AtomGeometry geom = make_geometry(cfg, params.n_atoms, require_spacing(cfg));
    params.n_atoms = geom.size();
    CouplingMatrices cpl = build_couplings(geom);
    if (!cfg.geometry.interactions) cpl = disable_interactions(std::move(cpl));
    const SteadyStateSolution sol = find_steady_state(params, cpl, solver_options(cfg));
    if (!sol.converged) {
        throw SolverFailure("steady-state solve failed: " + sol.failure);
    }

    csv.header({"kind", "mu", "nu", "re", "im"});
    const int n = params.n_atoms;
    for (int mu = 0; mu < n; ++mu) {
        csv.row({"population", std::to_string(mu), "", format_double(sol.state.populations[mu]), "0"});
    }
    for (int mu = 0; mu < n; ++mu) {
        csv.row({"atom_photon", std::to_string(mu), "", format_double(sol.state.atom_photon[mu].real()),
                 format_double(sol.state.atom_photon[mu].imag())});
    }
    for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
            const auto x = sol.state.atom_atom[CumulantState::pair_index(mu, nu, n)];
            csv.row({"pair_coherence", std::to_string(mu), std::to_string(nu),
                     format_double(x.real()), format_double(x.imag())});
        }
    }
    csv.row({"photon_number", "", "", format_double(sol.state.photon_number), "0"});

    json results;
    results["photon_number"] = sol.state.photon_number;
    results["populations"] = std::vector<double>(sol.state.populations.begin(), sol.state.populations.end());
    json coherences = json::array();
    for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
            const auto x = sol.state.atom_atom[CumulantState::pair_index(mu, nu, n)];
            coherences.push_back({{"mu", mu}, {"nu", nu}, {"re", x.real()}, {"im", x.imag()}});
        }
    }
    results["pair_coherences"] = coherences;
    j["results"] = results;
    j["diagnostics"] = {{"residual", sol.residual_norm},
                        {"iterations", sol.iterations},
                        {"method", to_string(sol.method)}};
}

// ---- spectrum ----

void run_spectrum(const RunConfig& cfg, int, CsvBuilder& csv, json& j) {
    SystemParams params = cfg.params;
    AtomGeometry geom = make_geometry(cfg, params.n_atoms, require_spacing(cfg));
    params.n_atoms = geom.size();
    CouplingMatrices cpl = build_couplings(geom);
    if (!cfg.geometry.interactions) cpl = disable_interactions(std::move(cpl));
    const SteadyStateSolution sol = find_steady_state(params, cpl, solver_options(cfg));
    if (!sol.converged) {
        throw SolverFailure("steady-state solve failed: " + sol.failure);
    }
    const RegressionSystem sys = build_regression(params, cpl, sol);
    const SpectrumAnalysis analysis = analyze_spectrum(sys);

    csv.header({"nu", "s"});
    for (Eigen::Index i = 0; i < analysis.spectrum.nu.size(); ++i) {
        csv.row({format_double(analysis.spectrum.nu[i]), format_double(analysis.spectrum.s[i])});
    }

    json results;
    results["fwhm"] = analysis.line.fwhm;
    results["center"] = analysis.line.center;
    results["peak"] = analysis.line.peak;
    results["photon_number"] = sol.state.photon_number;
    if (cfg.gamma_hz) {
        results["fwhm_hz"] = analysis.line.fwhm * *cfg.gamma_hz;
        results["center_hz"] = analysis.line.center * *cfg.gamma_hz;
    }
    j["results"] = results;
    j["diagnostics"] = {{"residual", sol.residual_norm},
                        {"iterations", sol.iterations},
                        {"method", to_string(sol.method)},
                        {"grid_points", analysis.spectrum.meta.points},
                        {"grid_rounds", analysis.spectrum.meta.rounds}};
}

// ---- sweep ----

void run_sweep_mode(const RunConfig& cfg, int jobs, CsvBuilder& csv, json& j) {
    SweepTemplate tpl;
    tpl.params = cfg.params;
    tpl.spacing = cfg.geometry.spacing.value_or(4.0);
    tpl.interactions = cfg.geometry.interactions;
    const SweepAxis axis = axis_from_config(cfg);
    SweepOptions options;
    options.compute_spectrum = cfg.sweep.compute_spectrum;
    options.jobs = jobs;
    options.solver = solver_options(cfg);
    const auto records = run_sweep(tpl, axis, options);

    csv.header({"axis", "value", "converged", "photon_number", "pop_min", "pop_max", "re_pair01",
                "im_pair01", "fwhm", "center", "peak", "spectrum_ok"});
    int failed = 0;
    double max_residual = 0.0;
    long iterations = 0;
    for (const auto& rec : records) {
        const bool has_pair = rec.converged && rec.pair_coherences.size() > 0;
        csv.row({to_string(axis.quantity), format_double(rec.axis_value),
                 rec.converged ? "1" : "0",
                 format_double(rec.converged ? rec.photon_number : NAN),
                 format_double(rec.converged ? rec.populations.minCoeff() : NAN),
                 format_double(rec.converged ? rec.populations.maxCoeff() : NAN),
                 format_double(has_pair ? rec.pair_coherences[0].real() : NAN),
                 format_double(has_pair ? rec.pair_coherences[0].imag() : NAN),
                 format_double(rec.spectrum_ok ? rec.fwhm : NAN),
                 format_double(rec.spectrum_ok ? rec.center : NAN),
                 format_double(rec.spectrum_ok ? rec.peak : NAN), rec.spectrum_ok ? "1" : "0"});
        failed += rec.converged ? 0 : 1;
        if (rec.converged) max_residual = std::max(max_residual, rec.residual);
        iterations += rec.iterations;
    }

    json results;
    results["points"] = records.size();
    results["failed_points"] = failed;
    const Optimum photon_opt = locate_optimum(records, Objective::max_photon);
    results["max_photon"] = {{"value", photon_opt.objective_value},
                             {"axis_value", photon_opt.axis_value},
                             {"interior", photon_opt.interior}};
    if (cfg.sweep.compute_spectrum) {
        bool any_fwhm = false;
        for (const auto& rec : records) any_fwhm = any_fwhm || rec.spectrum_ok;
        if (any_fwhm) {
            const Optimum fwhm_opt = locate_optimum(records, Objective::min_fwhm);
            json node = {{"value", fwhm_opt.objective_value},
                         {"axis_value", fwhm_opt.axis_value},
                         {"interior", fwhm_opt.interior}};
            if (cfg.gamma_hz) node["value_hz"] = fwhm_opt.objective_value * *cfg.gamma_hz;
            results["min_fwhm"] = node;
        }
    }
    j["results"] = results;
    j["diagnostics"] = {{"residual", max_residual}, {"iterations", iterations}};
}

// ---- scaling ----

void run_scaling(const RunConfig& cfg, int jobs, CsvBuilder& csv, json& j) {
    if (cfg.sweep.n_min < 2 || cfg.sweep.n_max < cfg.sweep.n_min) {
        throw ConfigError(0, "[sweep] scaling needs 2 <= n_min <= n_max");
    }
    SweepOptions options;
    options.compute_spectrum = true;
    options.jobs = jobs;
    options.solver = solver_options(cfg);
    const SweepAxis axis = SweepAxis::log_spaced(SweepAxis::Quantity::spacing, cfg.sweep.min,
                                                 cfg.sweep.max, cfg.sweep.points);

    std::vector<std::pair<double, double>> photon_on, photon_off, fwhm_on, fwhm_off;
    csv.header({"n_atoms", "opt_spacing_photon", "max_photon", "opt_spacing_fwhm", "min_fwhm",
                "photon_noninteracting", "fwhm_noninteracting"});
    long iterations = 0;
    double max_residual = 0.0;
    for (int n = cfg.sweep.n_min; n <= cfg.sweep.n_max; ++n) {
        SweepTemplate tpl;
        tpl.params = cfg.params;
        tpl.params.n_atoms = n;
        tpl.interactions = true;
        const auto records = run_sweep(tpl, axis, options);
        for (const auto& rec : records) {
            iterations += rec.iterations;
            if (rec.converged) max_residual = std::max(max_residual, rec.residual);
        }
        Optimum pmax = locate_optimum(records, Objective::max_photon);
        Optimum fmin = locate_optimum(records, Objective::min_fwhm);
        if (cfg.sweep.refine) {
            pmax = refine_optimum(records, Objective::max_photon, tpl, axis, options);
            fmin = refine_optimum(records, Objective::min_fwhm, tpl, axis, options);
        }

        // noninteracting reference at the far end of the grid
        SweepTemplate off = tpl;
        off.interactions = false;
        const SweepRecord ref = run_sweep(
            off, SweepAxis{SweepAxis::Quantity::spacing, {cfg.sweep.max}}, options)[0];
        if (!ref.converged || !ref.spectrum_ok) {
            throw SolverFailure("noninteracting reference failed at N = " + std::to_string(n));
        }

        photon_on.emplace_back(n, pmax.objective_value);
        fwhm_on.emplace_back(n, fmin.objective_value);
        photon_off.emplace_back(n, ref.photon_number);
        fwhm_off.emplace_back(n, ref.fwhm);
        csv.row({std::to_string(n), format_double(pmax.axis_value),
                 format_double(pmax.objective_value), format_double(fmin.axis_value),
                 format_double(fmin.objective_value), format_double(ref.photon_number),
                 format_double(ref.fwhm)});
    }

    auto fit_json = [](const ScalingFit& f) {
        return json{{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"r_squared", f.r_squared}};
    };
    const ScalingFit fit_photon_on = power_law_fit(photon_on);
    const ScalingFit fit_photon_off = power_law_fit(photon_off);
    const ScalingFit fit_fwhm_on = power_law_fit(fwhm_on);
    const ScalingFit fit_fwhm_off = power_law_fit(fwhm_off);

    json results;
    results["fits"] = {{"photon_interacting", fit_json(fit_photon_on)},
                       {"photon_noninteracting", fit_json(fit_photon_off)},
                       {"fwhm_interacting", fit_json(fit_fwhm_on)},
                       {"fwhm_noninteracting", fit_json(fit_fwhm_off)}};
    const double nt = cfg.sweep.n_target;
    json extrap;
    extrap["n_target"] = nt;
    extrap["note"] = "power-law extrapolation far beyond the fitted range; no physical claim";
    extrap["photon_interacting"] = extrapolate(fit_photon_on, nt);
    extrap["photon_noninteracting"] = extrapolate(fit_photon_off, nt);
    extrap["photon_enhancement"] = extrapolate(fit_photon_on, nt) / extrapolate(fit_photon_off, nt);
    extrap["fwhm_interacting"] = extrapolate(fit_fwhm_on, nt);
    extrap["fwhm_noninteracting"] = extrapolate(fit_fwhm_off, nt);
    extrap["fwhm_reduction_factor"] = extrapolate(fit_fwhm_off, nt) / extrapolate(fit_fwhm_on, nt);
    if (cfg.gamma_hz) {
        extrap["fwhm_interacting_hz"] = extrapolate(fit_fwhm_on, nt) * *cfg.gamma_hz;
    }
    results["extrapolation"] = extrap;
    j["results"] = results;
    j["diagnostics"] = {{"residual", max_residual}, {"iterations", iterations}};
}

// ---- oracle-check ----

void run_oracle_check(const RunConfig& cfg, int, CsvBuilder& csv, json& j) {
    SystemParams params = cfg.params;
    AtomGeometry geom = make_geometry(cfg, params.n_atoms, require_spacing(cfg));
    params.n_atoms = geom.size();
    if (params.n_atoms > 3) {
        throw ConfigError(0, "oracle-check supports at most 3 atoms");
    }
    CouplingMatrices cpl = build_couplings(geom);
    if (!cfg.geometry.interactions) cpl = disable_interactions(std::move(cpl));

    const SteadyStateSolution sol = find_steady_state(params, cpl, solver_options(cfg));
    if (!sol.converged) {
        throw SolverFailure("steady-state solve failed: " + sol.failure);
    }
    const TruncatedHilbert space{params.n_atoms, cfg.fock_cutoff};
    const Eigen::MatrixXcd rho = steady_density_matrix(build_liouvillian(params, cpl, space));
    const ExactObservables exact = observables(rho, space);
    // cutoff convergence check one Fock state higher
    const TruncatedHilbert larger{params.n_atoms, cfg.fock_cutoff + 1};
    const ExactObservables exact_hi =
        observables(steady_density_matrix(build_liouvillian(params, cpl, larger)), larger);

    auto rel_dev = [](double a, double b) {
        const double scale = std::max(std::abs(a), std::abs(b));
        return scale > 0 ? std::abs(a - b) / scale : 0.0;
    };

    csv.header({"observable", "mu", "nu", "cumulant", "exact", "rel_dev"});
    json rows = json::array();
    const int n = params.n_atoms;
    for (int mu = 0; mu < n; ++mu) {
        const double c = sol.state.populations[mu];
        const double e = exact.populations[mu];
        csv.row({"population", std::to_string(mu), "", format_double(c), format_double(e),
                 format_double(rel_dev(c, e))});
        rows.push_back({{"observable", "population"}, {"mu", mu}, {"cumulant", c}, {"exact", e},
                        {"rel_dev", rel_dev(c, e)}});
    }
    for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
            const auto c = sol.state.atom_atom[CumulantState::pair_index(mu, nu, n)];
            const auto e = exact.pair_coherences[CumulantState::pair_index(mu, nu, n)];
            const double dev = std::abs(c - e) / std::max({std::abs(c), std::abs(e), 1e-300});
            csv.row({"pair_coherence", std::to_string(mu), std::to_string(nu),
                     format_double(c.real()), format_double(e.real()), format_double(dev)});
            rows.push_back({{"observable", "pair_coherence"}, {"mu", mu}, {"nu", nu},
                            {"cumulant_re", c.real()}, {"exact_re", e.real()}, {"rel_dev", dev}});
        }
    }
    csv.row({"photon_number", "", "", format_double(sol.state.photon_number),
             format_double(exact.photon_number),
             format_double(rel_dev(sol.state.photon_number, exact.photon_number))});
    rows.push_back({{"observable", "photon_number"},
                    {"cumulant", sol.state.photon_number},
                    {"exact", exact.photon_number},
                    {"rel_dev", rel_dev(sol.state.photon_number, exact.photon_number)}});

    json results;
    results["comparison"] = rows;
    results["fock_cutoff"] = cfg.fock_cutoff;
    results["cutoff_convergence"] = {
        {"photon_rel_change", rel_dev(exact.photon_number, exact_hi.photon_number)},
        {"population_rel_change", rel_dev(exact.populations[0], exact_hi.populations[0])}};
    j["results"] = results;
    j["diagnostics"] = {{"residual", sol.residual_norm}, {"iterations", sol.iterations}};
}

// ---- fig5 ----

void run_fig5(const RunConfig& cfg, int jobs, CsvBuilder& csv, json& j) {
    const SweepAxis axis = axis_from_config(cfg);
    if (axis.quantity != SweepAxis::Quantity::spacing) {
        throw ConfigError(0, "fig5 needs a spacing axis");
    }
    SweepOptions options;
    options.jobs = jobs;
    options.solver = solver_options(cfg);
    const auto rows = coherence_decomposition(cfg.params, axis, options);

    csv.header({"spacing", "re_coh_12", "re_coh_23", "re_coh_13", "coherence_sum",
                "three_times_nn"});
    int failed = 0;
    for (const auto& row : rows) {
        csv.row({format_double(row.spacing), format_double(row.converged ? row.re_12 : NAN),
                 format_double(row.converged ? row.re_23 : NAN),
                 format_double(row.converged ? row.re_13 : NAN),
                 format_double(row.converged ? row.sum : NAN),
                 format_double(row.converged ? row.three_nn : NAN)});
        failed += row.converged ? 0 : 1;
    }
    j["results"] = {{"points", rows.size()}, {"failed_points", failed}};
    j["diagnostics"] = json::object();
}

}  // namespace

RunOutcome execute_run(const RunConfig& cfg, int jobs) {
    RunOutcome outcome;
    const auto t0 = std::chrono::steady_clock::now();
    CsvBuilder csv;
    json j = base_json(cfg);
    try {
        provenance(csv, cfg);
        switch (cfg.mode) {
            case RunMode::steady: run_steady(cfg, jobs, csv, j); break;
            case RunMode::spectrum: run_spectrum(cfg, jobs, csv, j); break;
            case RunMode::sweep: run_sweep_mode(cfg, jobs, csv, j); break;
            case RunMode::scaling: run_scaling(cfg, jobs, csv, j); break;
            case RunMode::oracle_check: run_oracle_check(cfg, jobs, csv, j); break;
            case RunMode::fig5: run_fig5(cfg, jobs, csv, j); break;
        }
    } catch (const ConfigError& ex) {
        outcome.exit_code = 1;
        outcome.error_json = json{{"error", "config"}, {"message", ex.what()}}.dump();
        return outcome;
    } catch (const SolverFailure& ex) {
        outcome.exit_code = 2;
        outcome.error_json = json{{"error", "solver"}, {"message", ex.what()}}.dump();
        return outcome;
    } catch (const std::exception& ex) {
        outcome.exit_code = 2;
        outcome.error_json = json{{"error", "runtime"}, {"message", ex.what()}}.dump();
        return outcome;
    }

    const auto t1 = std::chrono::steady_clock::now();
    j["diagnostics"]["wallclock_seconds"] = std::chrono::duration<double>(t1 - t0).count();
    try {
        std::filesystem::create_directories(cfg.output.dir);
        const std::string csv_path = artifact_path(cfg, ".csv");
        const std::string json_path = artifact_path(cfg, ".json");
        write_file_atomic(csv_path, csv.str());
        write_file_atomic(json_path, j.dump(2) + "\n");
        outcome.files = {csv_path, json_path};
    } catch (const std::exception& ex) {
        outcome.exit_code = 3;
        outcome.error_json = json{{"error", "io"}, {"message", ex.what()}}.dump();
    }
    return outcome;
}

}  // namespace srl
