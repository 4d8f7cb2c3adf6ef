#include "srl/dynamics.hpp"

#include <complex>
#include <stdexcept>

namespace srl {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

void check_dimensions(int n_state, const SystemParams& params, const CouplingMatrices& cpl) {
    if (params.n_atoms != n_state || cpl.size() != n_state) {
        throw std::invalid_argument("cumulant dynamics: atom count mismatch between state, params and couplings");
    }
}

// Packed-coordinate offsets; see CumulantState for the layout.
struct Layout {
    int n;
    int pop(int mu) const { return mu; }
    int re_c(int mu) const { return n + 2 * mu; }
    int im_c(int mu) const { return n + 2 * mu + 1; }
    int re_x(int p) const { return 3 * n + 2 * p; }
    int im_x(int p) const { return 3 * n + 2 * p + 1; }
    int photon() const { return 3 * n + n * (n - 1); }
};

}  // namespace

CumulantState rhs(const CumulantState& st, const SystemParams& params,
                  const CouplingMatrices& cpl) {
    const int n = st.n_atoms();
    check_dimensions(n, params, cpl);
    const double gamma = cpl.gamma;
    const double w = params.w;
    const double g = params.g;
    const Eigen::MatrixXd& F = cpl.decay;
    const Eigen::MatrixXd& G = cpl.shift;
    const double nph = st.photon_number;

    CumulantState out = CumulantState::zero(n);

    for (int mu = 0; mu < n; ++mu) {
        const double pop = st.populations[mu];
        const Complex c = st.atom_photon[mu];

        // d<sigma^ee>/dt: repump, decay, cavity exchange, collective
        // redistribution through the pair coherences.
        double dpop = w * (1.0 - pop) - gamma * pop - g * c.imag();
        for (int nu = 0; nu < n; ++nu) {
            if (nu == mu) continue;
            const Complex x = st.pair(mu, nu);
            dpop -= F(mu, nu) * x.real() - 2.0 * G(mu, nu) * x.imag();
        }
        out.populations[mu] = dpop;

        // d<a^dag sigma^->/dt
        Complex s{0.0, 0.0};  // sum over <sigma_nu^+ sigma_mu^->
        for (int nu = 0; nu < n; ++nu) {
            if (nu == mu) continue;
            s += st.pair(nu, mu);
        }
        Complex dc = (kI * params.delta - 0.5 * (w + params.kappa + gamma)) * c +
                     0.5 * kI * g * (nph * (2.0 * pop - 1.0) + pop + s);
        for (int nu = 0; nu < n; ++nu) {
            if (nu == mu) continue;
            dc -= 0.5 * Complex(F(mu, nu), 2.0 * G(mu, nu)) * (1.0 - 2.0 * pop) * st.atom_photon[nu];
        }
        out.atom_photon[mu] = dc;
    }

    for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
            const int p = CumulantState::pair_index(mu, nu, n);
            const double pop_mu = st.populations[mu];
            const double pop_nu = st.populations[nu];
            const Complex x = st.atom_atom[p];

            // d<sigma_mu^+ sigma_nu^->/dt
            Complex dx = -(w + gamma) * x -
                         0.5 * kI * g *
                             (st.atom_photon[nu] * (2.0 * pop_mu - 1.0) -
                              std::conj(st.atom_photon[mu]) * (2.0 * pop_nu - 1.0));
            // collective channels; the self-pair factors reduce to
            // population products
            for (int m = 0; m < n; ++m) {
                if (m == nu) continue;
                const Complex z = (m == mu) ? Complex(pop_mu, 0.0) : st.pair(mu, m);
                dx -= 0.5 * Complex(F(m, nu), 2.0 * G(m, nu)) * z * (1.0 - 2.0 * pop_nu);
            }
            for (int m = 0; m < n; ++m) {
                if (m == mu) continue;
                const Complex v = (m == nu) ? Complex(pop_nu, 0.0) : st.pair(m, nu);
                dx -= 0.5 * Complex(F(mu, m), -2.0 * G(mu, m)) * v * (1.0 - 2.0 * pop_mu);
            }
            out.atom_atom[p] = dx;
        }
    }

    double dn = -params.kappa * nph;
    for (int mu = 0; mu < n; ++mu) {
        dn += g * st.atom_photon[mu].imag();
    }
    out.photon_number = dn;

    return out;
}

Eigen::VectorXd packed_rhs(const Eigen::VectorXd& x, const SystemParams& params,
                           const CouplingMatrices& cpl) {
    return rhs(CumulantState::unpack(x, params.n_atoms), params, cpl).pack();
}

Eigen::MatrixXd analytic_jacobian(const Eigen::VectorXd& xvec, const SystemParams& params,
                                  const CouplingMatrices& cpl) {
    const int n = params.n_atoms;
    const CumulantState st = CumulantState::unpack(xvec, n);
    check_dimensions(n, params, cpl);
    const Layout L{n};
    const double gamma = cpl.gamma;
    const double w = params.w;
    const double g = params.g;
    const double delta = params.delta;
    const double a = 0.5 * (w + params.kappa + gamma);
    const Eigen::MatrixXd& F = cpl.decay;
    const Eigen::MatrixXd& G = cpl.shift;

    const int dim = CumulantState::packed_size(n);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);

    // pair bookkeeping: stored index and conjugation sign of <mu^+ nu^->
    auto stored = [&](int mu, int nu) {
        return (mu < nu) ? CumulantState::pair_index(mu, nu, n)
                         : CumulantState::pair_index(nu, mu, n);
    };
    auto sgn = [&](int mu, int nu) { return (mu < nu) ? 1.0 : -1.0; };

    // population rows
    for (int mu = 0; mu < n; ++mu) {
        J(L.pop(mu), L.pop(mu)) -= w + gamma;
        J(L.pop(mu), L.im_c(mu)) -= g;
        for (int nu = 0; nu < n; ++nu) {
            if (nu == mu) continue;
            const int q = stored(mu, nu);
            J(L.pop(mu), L.re_x(q)) -= F(mu, nu);
            J(L.pop(mu), L.im_x(q)) += 2.0 * G(mu, nu) * sgn(mu, nu);
        }
    }

    // atom-photon rows
    for (int mu = 0; mu < n; ++mu) {
        const double pop = st.populations[mu];
        const int rc = L.re_c(mu);
        const int ic = L.im_c(mu);

        J(rc, rc) -= a;
        J(rc, ic) -= delta;
        J(ic, rc) += delta;
        J(ic, ic) -= a;

        // drive term: Re S_mu feeds Im C, Im S_mu feeds Re C
        J(ic, L.photon()) += 0.5 * g * (2.0 * pop - 1.0);
        double sum_re_fc = 0.0;  // sum (F/2) c_nu - G d_nu
        double sum_im_fc = 0.0;  // sum (F/2) d_nu + G c_nu
        for (int nu = 0; nu < n; ++nu) {
            if (nu == mu) continue;
            // S_mu = sum <sigma_nu^+ sigma_mu^->
            const int q = stored(nu, mu);
            const double s_im = sgn(nu, mu);
            J(rc, L.im_x(q)) -= 0.5 * g * s_im;
            J(ic, L.re_x(q)) += 0.5 * g;

            const double cr = st.atom_photon[nu].real();
            const double ci = st.atom_photon[nu].imag();
            J(rc, L.re_c(nu)) -= (1.0 - 2.0 * pop) * 0.5 * F(mu, nu);
            J(rc, L.im_c(nu)) += (1.0 - 2.0 * pop) * G(mu, nu);
            J(ic, L.re_c(nu)) -= (1.0 - 2.0 * pop) * G(mu, nu);
            J(ic, L.im_c(nu)) -= (1.0 - 2.0 * pop) * 0.5 * F(mu, nu);
            sum_re_fc += 0.5 * F(mu, nu) * cr - G(mu, nu) * ci;
            sum_im_fc += 0.5 * F(mu, nu) * ci + G(mu, nu) * cr;
        }
        J(ic, L.pop(mu)) += 0.5 * g * (2.0 * st.photon_number + 1.0) + 2.0 * sum_im_fc;
        J(rc, L.pop(mu)) += 2.0 * sum_re_fc;
    }

    // atom-atom rows
    for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
            const int p = CumulantState::pair_index(mu, nu, n);
            const int rx = L.re_x(p);
            const int ix = L.im_x(p);
            const double pop_mu = st.populations[mu];
            const double pop_nu = st.populations[nu];

            J(rx, rx) -= w + gamma;
            J(ix, ix) -= w + gamma;

            // cavity source (g/2i)[C_nu (2P_mu - 1) - conj(C_mu)(2P_nu - 1)]
            J(rx, L.im_c(nu)) += 0.5 * g * (2.0 * pop_mu - 1.0);
            J(rx, L.im_c(mu)) += 0.5 * g * (2.0 * pop_nu - 1.0);
            J(rx, L.pop(mu)) += g * st.atom_photon[nu].imag();
            J(rx, L.pop(nu)) += g * st.atom_photon[mu].imag();
            J(ix, L.re_c(nu)) -= 0.5 * g * (2.0 * pop_mu - 1.0);
            J(ix, L.re_c(mu)) += 0.5 * g * (2.0 * pop_nu - 1.0);
            J(ix, L.pop(mu)) -= g * st.atom_photon[nu].real();
            J(ix, L.pop(nu)) += g * st.atom_photon[mu].real();

            // line 3: -(1 - 2P_nu) sum_{m != nu} W+_{m nu} <mu^+ m^->
            double t3_re = 0.0;
            double t3_im = 0.0;
            for (int m = 0; m < n; ++m) {
                if (m == nu) continue;
                double zr;
                double zi;
                if (m == mu) {
                    zr = pop_mu;
                    zi = 0.0;
                    J(rx, L.pop(mu)) -= (1.0 - 2.0 * pop_nu) * 0.5 * F(mu, nu);
                    J(ix, L.pop(mu)) -= (1.0 - 2.0 * pop_nu) * G(mu, nu);
                } else {
                    const Complex z = st.pair(mu, m);
                    zr = z.real();
                    zi = z.imag();
                    const int q = stored(mu, m);
                    const double s = sgn(mu, m);
                    J(rx, L.re_x(q)) -= (1.0 - 2.0 * pop_nu) * 0.5 * F(m, nu);
                    J(rx, L.im_x(q)) += (1.0 - 2.0 * pop_nu) * G(m, nu) * s;
                    J(ix, L.re_x(q)) -= (1.0 - 2.0 * pop_nu) * G(m, nu);
                    J(ix, L.im_x(q)) -= (1.0 - 2.0 * pop_nu) * 0.5 * F(m, nu) * s;
                }
                t3_re += 0.5 * F(m, nu) * zr - G(m, nu) * zi;
                t3_im += 0.5 * F(m, nu) * zi + G(m, nu) * zr;
            }
            J(rx, L.pop(nu)) += 2.0 * t3_re;
            J(ix, L.pop(nu)) += 2.0 * t3_im;

            // line 4: -(1 - 2P_mu) sum_{m != mu} W-_{mu m} <m^+ nu^->
            double t4_re = 0.0;
            double t4_im = 0.0;
            for (int m = 0; m < n; ++m) {
                if (m == mu) continue;
                double vr;
                double vi;
                if (m == nu) {
                    vr = pop_nu;
                    vi = 0.0;
                    J(rx, L.pop(nu)) -= (1.0 - 2.0 * pop_mu) * 0.5 * F(mu, nu);
                    J(ix, L.pop(nu)) += (1.0 - 2.0 * pop_mu) * G(mu, nu);
                } else {
                    const Complex v = st.pair(m, nu);
                    vr = v.real();
                    vi = v.imag();
                    const int q = stored(m, nu);
                    const double s = sgn(m, nu);
                    J(rx, L.re_x(q)) -= (1.0 - 2.0 * pop_mu) * 0.5 * F(mu, m);
                    J(rx, L.im_x(q)) -= (1.0 - 2.0 * pop_mu) * G(mu, m) * s;
                    J(ix, L.re_x(q)) += (1.0 - 2.0 * pop_mu) * G(mu, m);
                    J(ix, L.im_x(q)) -= (1.0 - 2.0 * pop_mu) * 0.5 * F(mu, m) * s;
                }
                t4_re += 0.5 * F(mu, m) * vr + G(mu, m) * vi;
                t4_im += 0.5 * F(mu, m) * vi - G(mu, m) * vr;
            }
            J(rx, L.pop(mu)) += 2.0 * t4_re;
            J(ix, L.pop(mu)) += 2.0 * t4_im;
        }
    }

    // photon row
    J(L.photon(), L.photon()) -= params.kappa;
    for (int mu = 0; mu < n; ++mu) {
        J(L.photon(), L.im_c(mu)) += g;
    }

    return J;
}

}  // namespace srl
