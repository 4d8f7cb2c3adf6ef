#include "srl/steady_state.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>

namespace srl {

const char* to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::newton: return "newton";
        case SolveMethod::integrate_then_newton: return "integrate-then-newton";
        case SolveMethod::integrate_only: return "integrate-only";
    }
    return "unknown";
}

SingleAtomFixedPoint single_atom_closed_form(const SystemParams& params) {
    params.validate();
    if (params.n_atoms != 1) {
        throw std::invalid_argument("single_atom_closed_form: n_atoms must be 1");
    }
    if (params.delta != 0.0) {
        throw std::invalid_argument("single_atom_closed_form: nonzero detuning unsupported");
    }
    const double gamma = 1.0;
    const double denom = params.w + params.kappa + gamma;
    const double beta = params.kappa > 0.0 ? params.g * params.g / (params.kappa * denom) : 0.0;
    auto photon_of = [&](double pop) { return beta * pop / (1.0 - beta * (2.0 * pop - 1.0)); };
    auto balance = [&](double pop) {
        return params.w * (1.0 - pop) - gamma * pop - params.kappa * photon_of(pop);
    };
    // Bisect where the photon number is non-negative.  Above the lasing
    // threshold (beta >= 1) the rational photon expression has a pole inside
    // [0, 1]; the physical root sits below it.
    double lo = 0.0;
    double hi = 1.0;
    if (beta > 1.0) {
        hi = std::min(1.0, 0.5 * (1.0 + 1.0 / beta) * (1.0 - 1e-14));
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (balance(mid) >= 0.0 ? lo : hi) = mid;
    }
    const double pop = 0.5 * (lo + hi);
    const double nph = photon_of(pop);
    const std::complex<double> coh{0.0, params.g * (nph * (2.0 * pop - 1.0) + pop) / denom};
    return {pop, nph, coh};
}

double scaled_residual_norm(const Eigen::VectorXd& rhs_value, const Eigen::VectorXd& state) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < rhs_value.size(); ++i) {
        worst = std::max(worst, std::abs(rhs_value[i]) / (1.0 + std::abs(state[i])));
    }
    return worst;
}

Eigen::VectorXd default_initial_guess(const SystemParams& params) {
    const int n = params.n_atoms;
    CumulantState st = CumulantState::zero(n);
    const double gamma = 1.0;
    double pop0 = params.w / (params.w + gamma);
    double nph0 = 0.0;
    if (params.delta == 0.0) {
        SystemParams one = params;
        one.n_atoms = 1;
        const auto fp = single_atom_closed_form(one);
        pop0 = fp.population;
        nph0 = fp.photon_number;
    }
    st.populations.setConstant(pop0);
    st.photon_number = nph0;
    return st.pack();
}

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

struct Workspace {
    const SystemParams& params;
    const CouplingMatrices& cpl;
    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
        return packed_rhs(x, params, cpl);
    }
};

// Damped Newton; returns true when the scaled residual reaches tol.
bool newton_solve(const Workspace& f, Eigen::VectorXd& x, double tol, int max_iter,
                  int& iterations, Eigen::VectorXd& best_x, double& best_res) {
    Eigen::VectorXd r = f(x);
    if (!all_finite(r)) return false;
    double res = scaled_residual_norm(r, x);
    if (res < best_res) {
        best_res = res;
        best_x = x;
    }
    for (int it = 0; it < max_iter; ++it) {
        if (res <= tol) return true;
        const Eigen::MatrixXd J = analytic_jacobian(x, f.params, f.cpl);
        const Eigen::VectorXd dx = Eigen::PartialPivLU<Eigen::MatrixXd>(J).solve(-r);
        if (!all_finite(dx)) return false;
        double lambda = 1.0;
        bool accepted = false;
        for (int back = 0; back < 30; ++back) {
            const Eigen::VectorXd xt = x + lambda * dx;
            const Eigen::VectorXd rt = f(xt);
            if (all_finite(rt)) {
                const double rest = scaled_residual_norm(rt, xt);
                if (rest < res * (1.0 - 1e-4 * lambda)) {
                    x = xt;
                    r = rt;
                    res = rest;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        ++iterations;
        if (!accepted) return false;
        if (res < best_res) {
            best_res = res;
            best_x = x;
        }
    }
    return res <= tol;
}

// Backward Euler with adaptive step, Newton inner iterations on each step.
bool integrate_towards(const Workspace& f, Eigen::VectorXd& x, double target, int max_steps,
                       int& iterations, Eigen::VectorXd& best_x, double& best_res) {
    double h = 1e-7;
    for (int step = 0; step < max_steps; ++step) {
        const Eigen::VectorXd r = f(x);
        if (!all_finite(r)) return false;
        const double res = scaled_residual_norm(r, x);
        if (res < best_res) {
            best_res = res;
            best_x = x;
        }
        if (res <= target) return true;

        Eigen::VectorXd z = x;
        bool inner_ok = false;
        for (int inner = 0; inner < 12; ++inner) {
            const Eigen::VectorXd fz = f(z);
            if (!all_finite(fz)) break;
            const Eigen::VectorXd residual = z - x - h * fz;
            if (scaled_residual_norm(residual, z) < 1e-13) {
                inner_ok = true;
                break;
            }
            Eigen::MatrixXd A = -h * analytic_jacobian(z, f.params, f.cpl);
            A.diagonal().array() += 1.0;
            const Eigen::VectorXd dz = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(-residual);
            if (!all_finite(dz)) break;
            z += dz;
        }
        ++iterations;
        if (inner_ok && all_finite(z)) {
            x = z;
            h = std::min(h * 1.7, 50.0);
        } else {
            h *= 0.25;
            if (h < 1e-13) return false;
        }
    }
    const double res = scaled_residual_norm(f(x), x);
    return res <= target;
}

std::string check_invariants(const CumulantState& st) {
    constexpr double slack = 1e-9;
    for (int mu = 0; mu < st.n_atoms(); ++mu) {
        const double p = st.populations[mu];
        if (p < -slack || p > 1.0 + slack) {
            return "population " + std::to_string(mu) + " outside [0, 1]";
        }
    }
    if (st.photon_number < -slack) {
        return "negative photon number";
    }
    for (Eigen::Index p = 0; p < st.atom_atom.size(); ++p) {
        if (std::abs(st.atom_atom[p]) > 1.0 + slack) {
            return "pair coherence magnitude above 1";
        }
    }
    return {};
}

}  // namespace

SteadyStateSolution find_steady_state(const SystemParams& params, const CouplingMatrices& cpl,
                                      const SolverOptions& options) {
    params.validate();
    if (cpl.size() != params.n_atoms) {
        throw std::invalid_argument("find_steady_state: couplings dimension mismatch");
    }
    const int dim = CumulantState::packed_size(params.n_atoms);
    Eigen::VectorXd x = options.initial_guess ? *options.initial_guess : default_initial_guess(params);
    if (x.size() != dim) {
        throw std::invalid_argument("find_steady_state: initial guess has wrong dimension");
    }

    const Workspace f{params, cpl};
    SteadyStateSolution sol;
    Eigen::VectorXd best_x = x;
    double best_res = std::numeric_limits<double>::infinity();
    int iterations = 0;

    bool ok = newton_solve(f, x, options.tolerance, options.max_newton_iterations, iterations,
                           best_x, best_res);
    sol.method = SolveMethod::newton;
    if (ok && !check_invariants(CumulantState::unpack(x, params.n_atoms)).empty()) {
        // Newton found an unphysical root; let the integrator follow the
        // dynamics to the attractor instead.
        ok = false;
        best_res = std::numeric_limits<double>::infinity();
    }

    if (!ok) {
        // stiff fallback: integrate to a loose residual, then polish
        x = options.initial_guess ? *options.initial_guess : default_initial_guess(params);
        const bool reached = integrate_towards(f, x, 1e-6, options.max_integrator_steps, iterations,
                                               best_x, best_res);
        if (reached) {
            ok = newton_solve(f, x, options.tolerance, options.max_newton_iterations, iterations,
                              best_x, best_res);
            sol.method = SolveMethod::integrate_then_newton;
        }
        if (!ok) {
            ok = integrate_towards(f, x, options.tolerance, options.max_integrator_steps, iterations,
                                   best_x, best_res);
            sol.method = SolveMethod::integrate_only;
        }
    }

    const Eigen::VectorXd& final_x = ok ? x : best_x;
    sol.state = CumulantState::unpack(final_x, params.n_atoms);
    sol.iterations = iterations;
    // independent residual evaluation on the returned state
    sol.residual_norm = scaled_residual_norm(packed_rhs(final_x, params, cpl), final_x);
    sol.converged = ok && sol.residual_norm <= options.tolerance;
    if (!sol.converged) {
        sol.failure = "no convergence: best scaled residual " + std::to_string(best_res);
    } else if (auto bad = check_invariants(sol.state); !bad.empty()) {
        sol.converged = false;
        sol.failure = "state invariant violated: " + bad;
    }
    return sol;
}

}  // namespace srl
