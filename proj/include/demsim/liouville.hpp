#pragma once

#include "demsim/hilbert.hpp"

namespace demsim {

// Dense density matrix for n_atoms <= 6; trace 1, Hermitian, PSD within
// integration tolerances.
struct density_matrix {
    int n_atoms = 0;
    cmat rho;

    density_matrix(int n_atoms_, cmat rho_);
    static density_matrix pure(const quantum_state& psi);

    double trace_real() const { return rho.trace().real(); }
    double hermiticity_error() const { return (rho - rho.adjoint()).norm(); }
    double min_eigenvalue() const;
};

// gamma (2 J- rho J+ - J+J- rho - rho J+J-), traceless.
cmat lindblad_rhs(const cmat& rho, const coupling_config& c);

// Classic RK4 until ||rhs||_F < tol; throws after max_steps.
density_matrix evolve_to_stationary(const density_matrix& rho0, const coupling_config& c0,
                                    double dt = 0.01, double tol = 1e-10, long max_steps = 1000000);

// Ensemble-exact relaxed emission rate: start every pair in
// (cos delta, 1, 0, sin delta)/sqrt2, relax under c0_relax, then evaluate
// alpha = 2 gamma tr(J+J- rho_inf) under c_perturbed. N in {2, 4, 6}.
// alpha is quadratic in psi, so this trace equals the trajectory average.
double exact_relaxed_alpha(int n_atoms, double delta, const coupling_config& c0_relax,
                           const coupling_config& c_perturbed);

}  // namespace demsim
