#include "srl/master_equation.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace srl {

namespace {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
constexpr Complex kI{0.0, 1.0};

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

struct Operators {
    std::vector<Matrix> sigma_minus;  // per atom
    std::vector<Matrix> sigma_ee;
    Matrix annihilate;                // cavity mode
    Matrix identity;
};

Operators build_operators(const TruncatedHilbert& space) {
    const int nf = space.photon_cutoff + 1;
    Matrix id2 = Matrix::Identity(2, 2);
    Matrix sm2 = Matrix::Zero(2, 2);
    sm2(0, 1) = 1.0;  // |g><e|
    Matrix ee2 = Matrix::Zero(2, 2);
    ee2(1, 1) = 1.0;
    Matrix idf = Matrix::Identity(nf, nf);
    Matrix af = Matrix::Zero(nf, nf);
    for (int n = 1; n < nf; ++n) {
        af(n - 1, n) = std::sqrt(static_cast<double>(n));
    }

    Operators ops;
    Matrix id_atoms = Matrix::Identity(1, 1);
    for (int mu = 0; mu < space.n_atoms; ++mu) {
        Matrix sm = Matrix::Identity(1, 1);
        Matrix ee = Matrix::Identity(1, 1);
        for (int k = 0; k < space.n_atoms; ++k) {
            sm = kron(sm, k == mu ? sm2 : id2);
            ee = kron(ee, k == mu ? ee2 : id2);
        }
        ops.sigma_minus.push_back(kron(sm, idf));
        ops.sigma_ee.push_back(kron(ee, idf));
        id_atoms = kron(id_atoms, id2);
    }
    ops.annihilate = kron(id_atoms, af);
    ops.identity = Matrix::Identity(space.dim(), space.dim());
    return ops;
}

// vec(A rho B) = (B^T kron A) vec(rho), column-major vectorization
Matrix sandwich(const Matrix& a, const Matrix& b) { return kron(b.transpose(), a); }

Matrix dissipator(const Matrix& jump, const Matrix& id) {
    const Matrix jj = jump.adjoint() * jump;
    return sandwich(jump, jump.adjoint()) - 0.5 * sandwich(jj, id) - 0.5 * sandwich(id, jj);
}

}  // namespace

void TruncatedHilbert::validate() const {
    if (n_atoms < 1 || n_atoms > 3) {
        throw std::invalid_argument("TruncatedHilbert: n_atoms must be 1..3");
    }
    if (photon_cutoff < 2) {
        throw std::invalid_argument("TruncatedHilbert: photon_cutoff must be >= 2");
    }
    const long d = dim();
    if (d * d > 10000) {
        throw std::invalid_argument("TruncatedHilbert: superoperator dimension guard exceeded");
    }
}

Eigen::MatrixXcd build_liouvillian(const SystemParams& params, const CouplingMatrices& cpl,
                                   const TruncatedHilbert& space) {
    params.validate();
    space.validate();
    if (params.n_atoms != space.n_atoms || cpl.size() != space.n_atoms) {
        throw std::invalid_argument("build_liouvillian: atom count mismatch");
    }
    const Operators ops = build_operators(space);
    const int n = space.n_atoms;

    Matrix h = params.delta * (ops.annihilate.adjoint() * ops.annihilate);
    for (int mu = 0; mu < n; ++mu) {
        h += 0.5 * params.g *
             (ops.annihilate.adjoint() * ops.sigma_minus[mu] +
              ops.sigma_minus[mu].adjoint() * ops.annihilate);
        for (int nu = 0; nu < n; ++nu) {
            if (nu == mu) continue;
            h += cpl.shift(mu, nu) * (ops.sigma_minus[mu].adjoint() * ops.sigma_minus[nu]);
        }
    }

    Matrix L = -kI * (sandwich(h, ops.identity) - sandwich(ops.identity, h));
    L += params.kappa * dissipator(ops.annihilate, ops.identity);
    for (int mu = 0; mu < n; ++mu) {
        L += params.w * dissipator(ops.sigma_minus[mu].adjoint(), ops.identity);
    }
    // collective emission with the full decay matrix, diagonal included
    for (int mu = 0; mu < n; ++mu) {
        for (int nu = 0; nu < n; ++nu) {
            const Matrix cross = ops.sigma_minus[mu].adjoint() * ops.sigma_minus[nu];
            L += cpl.decay(mu, nu) *
                 (sandwich(ops.sigma_minus[nu], ops.sigma_minus[mu].adjoint()) -
                  0.5 * sandwich(cross, ops.identity) - 0.5 * sandwich(ops.identity, cross));
        }
    }
    return L;
}

Eigen::MatrixXcd steady_density_matrix(const Eigen::MatrixXcd& liouvillian) {
    const Eigen::Index d2 = liouvillian.rows();
    const Eigen::Index d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(d2))));
    if (d * d != d2 || liouvillian.cols() != d2) {
        throw std::invalid_argument("steady_density_matrix: superoperator is not square over a density matrix");
    }
    Eigen::BDCSVD<Matrix> svd(liouvillian, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double scale = sigma[0] > 0.0 ? sigma[0] : 1.0;
    if (d2 >= 2 && sigma[d2 - 2] < 1e-10 * scale) {
        throw std::runtime_error("steady_density_matrix: degenerate null space (dimension >= 2) for a " +
                                 std::to_string(d) + "x" + std::to_string(d) + " density matrix");
    }
    Eigen::VectorXcd null_vec = svd.matrixV().col(d2 - 1);
    Matrix rho = Eigen::Map<const Matrix>(null_vec.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12) {
        throw std::runtime_error("steady_density_matrix: null vector has vanishing trace");
    }
    rho /= tr;
    const double residual = (liouvillian * Eigen::Map<const Eigen::VectorXcd>(rho.data(), d2)).norm();
    if (!(residual < 1e-10 * std::max(1.0, scale))) {
        throw std::runtime_error("steady_density_matrix: residual " + std::to_string(residual) +
                                 " too large");
    }
    return rho;
}

ExactObservables observables(const Eigen::MatrixXcd& rho, const TruncatedHilbert& space) {
    space.validate();
    if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
        throw std::invalid_argument("observables: density matrix does not match the space");
    }
    const Operators ops = build_operators(space);
    const int n = space.n_atoms;
    ExactObservables out;
    out.populations.resize(n);
    for (int mu = 0; mu < n; ++mu) {
        out.populations[mu] = (rho * ops.sigma_ee[mu]).trace().real();
    }
    out.pair_coherences.resize(n * (n - 1) / 2);
    int p = 0;
    for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
            out.pair_coherences[p++] =
                (rho * ops.sigma_minus[mu].adjoint() * ops.sigma_minus[nu]).trace();
        }
    }
    out.photon_number = (rho * ops.annihilate.adjoint() * ops.annihilate).trace().real();
    return out;
}

}  // namespace srl
