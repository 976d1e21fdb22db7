#include "demsim/liouville.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

#include "demsim/states.hpp"

namespace demsim {

namespace {

void guard_size(int n_atoms, const cmat& rho) {
    if (n_atoms < 1 || n_atoms > 6) throw std::invalid_argument("density matrices restricted to n_atoms <= 6");
    Eigen::Index dim = Eigen::Index{1} << n_atoms;
    if (rho.rows() != dim || rho.cols() != dim) throw std::invalid_argument("density matrix has wrong shape");
}

// columnwise J- rho and rho J+ = (J- rho^dagger)^dagger via the bit kernels;
// avoids dense operator products.
cmat jm_times(const cmat& rho, const cvec& g) {
    cmat out(rho.rows(), rho.cols());
    cvec tmp(rho.rows());
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        apply_j_minus_raw(rho.col(c), g, tmp);
        out.col(c) = tmp;
    }
    return out;
}

}  // namespace

density_matrix::density_matrix(int n_atoms_, cmat rho_) : n_atoms(n_atoms_), rho(std::move(rho_)) {
    guard_size(n_atoms, rho);
    if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-12)
        throw std::invalid_argument("density matrix must have unit trace");
    if ((rho - rho.adjoint()).norm() > 1e-10) throw std::invalid_argument("density matrix must be Hermitian");
}

density_matrix density_matrix::pure(const quantum_state& psi) {
    return density_matrix(psi.n_atoms(), psi.amplitudes() * psi.amplitudes().adjoint());
}

double density_matrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

cmat lindblad_rhs(const cmat& rho, const coupling_config& c) {
    if (c.n_atoms() > 6) throw std::invalid_argument("density matrices restricted to n_atoms <= 6");
    Eigen::Index dim = Eigen::Index{1} << c.n_atoms();
    if (rho.rows() != dim || rho.cols() != dim) throw std::invalid_argument("density matrix has wrong shape");

    cmat jm_rho = jm_times(rho, c.g_tilde);
    cmat jm_rho_jp = jm_times(jm_rho.adjoint(), c.g_tilde).adjoint();  // (J- rho) J+

    auto jpjm_times = [&](const cmat& m) {
        cmat out(m.rows(), m.cols());
        cvec tmp(m.rows()), tmp2(m.rows());
        for (Eigen::Index col = 0; col < m.cols(); ++col) {
            apply_j_minus_raw(m.col(col), c.g_tilde, tmp);
            apply_j_plus_raw(tmp, c.g_tilde, tmp2);
            out.col(col) = tmp2;
        }
        return out;
    };
    cmat jpjm_rho = jpjm_times(rho);
    cmat rho_jpjm = jpjm_times(rho.adjoint()).adjoint();  // rho J+ J- for any rho
    return c.gamma * (2.0 * jm_rho_jp - jpjm_rho - rho_jpjm);
}

density_matrix evolve_to_stationary(const density_matrix& rho0, const coupling_config& c0, double dt,
                                    double tol, long max_steps) {
    if (!(dt > 0.0) || !(tol > 0.0)) throw std::invalid_argument("dt and tol must be positive");
    double step = dt / c0.gamma;
    cmat rho = rho0.rho;
    for (long n = 0; n < max_steps; ++n) {
        cmat k1 = lindblad_rhs(rho, c0);
        if (k1.norm() < tol) return density_matrix(rho0.n_atoms, std::move(rho));
        cmat k2 = lindblad_rhs(rho + 0.5 * step * k1, c0);
        cmat k3 = lindblad_rhs(rho + 0.5 * step * k2, c0);
        cmat k4 = lindblad_rhs(rho + step * k3, c0);
        rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    throw std::runtime_error("stationary state not reached after " + std::to_string(max_steps) +
                             " steps; residual " + std::to_string(lindblad_rhs(rho, c0).norm()));
}

double exact_relaxed_alpha(int n_atoms, double delta, const coupling_config& c0_relax,
                           const coupling_config& c_perturbed) {
    if (n_atoms != 2 && n_atoms != 4 && n_atoms != 6)
        throw std::invalid_argument("exact relaxed alpha supported for N in {2, 4, 6}");
    const double inv_sqrt2 = 0.70710678118654752440;
    quantum_state psi0 = imperfect_pair_state(std::cos(delta) * inv_sqrt2, inv_sqrt2, 0.0,
                                              std::sin(delta) * inv_sqrt2, n_atoms);
    density_matrix rho_inf = evolve_to_stationary(density_matrix::pure(psi0), c0_relax);
    // alpha = 2 gamma tr(J+ J- rho) = 2 gamma sum_col ||J- col||^2-style trace
    cvec tmp(rho_inf.rho.rows()), tmp2(rho_inf.rho.rows());
    std::complex<double> tr = 0.0;
    for (Eigen::Index col = 0; col < rho_inf.rho.cols(); ++col) {
        apply_j_minus_raw(rho_inf.rho.col(col), c_perturbed.g_tilde, tmp);
        apply_j_plus_raw(tmp, c_perturbed.g_tilde, tmp2);
        tr += tmp2[col];
    }
    return 2.0 * c_perturbed.gamma * tr.real();
}

}  // namespace demsim
