#pragma once

#include <cstdint>
#include <vector>

#include "demsim/hilbert.hpp"
#include "demsim/rng.hpp"

namespace demsim {

struct sse_config {
    double dt = 0.01;              // step in units of 1/gamma
    double convergence_tol = 1e-12;
    long max_steps = 1000000;
    std::uint64_t seed = 0;
    long n_realizations = 1;
    bool keep_realizations = false;
};

struct ensemble_result {
    double mean_alpha = 0.0;
    double std_error = 0.0;
    long n_realizations = 0;
    std::uint64_t seed = 0;
    long dark_residual_warnings = 0;  // relaxed states with ||J- psi|| > 1e-6
    std::vector<double> per_realization;  // filled when keep_realizations
};

// One Euler step of the diffusive unraveling
//   dpsi = D1 dt + D2 dW,
//   D1 = gamma (2 <J-> J- - J+J- - <J->^2) psi,
//   D2 = sqrt(2 gamma) (J- - <J->) psi,
// followed by renormalization. Couplings must be real; dark states are exact
// fixed points. dW is the noise increment, Normal(0, dt) when sampled.
quantum_state sse_step(const quantum_state& psi, const coupling_config& c0, double dt, double dw);

// Run sse_step with fresh noise until ||psi_{k+1} - psi_k|| < tol.
quantum_state relax_to_dark(const quantum_state& psi0, const coupling_config& c0,
                            const sse_config& cfg, counter_rng& rng);

// Relax n_realizations copies of psi0 under c0_relax, evaluate
// 2 gamma ||J- psi||^2 under c_perturbed, and aggregate. Realization r always
// draws from substream (seed, r), so the result does not depend on the worker
// count; the reduction is sequential compensated summation in index order.
ensemble_result ensemble_alpha(const quantum_state& psi0, const coupling_config& c0_relax,
                               const coupling_config& c_perturbed, const sse_config& cfg);

// Worker count: DEMSIM_WORKERS when set, hardware concurrency otherwise.
int default_workers();

// Realization-count preset per system size (N = 2..18), sized so ensemble
// means are well converged at each N.
long reference_n_realizations(int n_atoms);

}  // namespace demsim
