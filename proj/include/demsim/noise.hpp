#pragma once

#include <optional>
#include <string>

#include "demsim/hilbert.hpp"
#include "demsim/rng.hpp"
#include "demsim/states.hpp"

namespace demsim {

// Covariance of the coupling fluctuations, C_ij = <dg_i dg_j>. Symmetric PSD.
struct correlation_matrix {
    dmat c;

    explicit correlation_matrix(dmat m);
    int n_atoms() const { return static_cast<int>(c.rows()); }
};

enum class correlation_case {
    uncorrelated,        // independent per-atom fluctuations, diag(C_i)
    pairwise_identical,  // atom i and its partner i+N/2 fluctuate identically
    intra_set,           // full correlation inside each set, none across
};

// Uniform-parameter constructors of the three regimes (variance c_var >= 0).
correlation_matrix make_correlation(correlation_case kind, int n_atoms, double c_var);
// General pairwise-identical matrix from an (N/2)x(N/2) block.
correlation_matrix make_correlation_pairwise(const dmat& block);

// True when the cross-set cancellation that silences the background holds for
// the given reference set couplings:
// C_ij g2^2 + C_{i+N/2,j+N/2} g1^2 - (C_{i,j+N/2} + C_{i+N/2,j}) g1 g2 = 0.
bool pairwise_cancellation_holds(const correlation_matrix& c, double g1_ref, double g2_ref,
                                 double tol = 1e-12);

// Mean fluctuation-induced rate gamma sum_i (C_ii + C_{i'i'} - C_{ii'} - C_{i'i}) |b_i|^2
// (i' = i + N/2); a constant offset, subtractable from any measurement.
double background_alpha(const correlation_matrix& c, const std::vector<std::complex<double>>& b_weights,
                        double gamma);

// K = sqrt( sum_ij (C_ij + C_{i'j'} - C_{ij'} - C_{i'j}) S_i S_j ) with
// S_i = |b_i|^2 + b_i a_i sum_{j != i} b_j a_j (real amplitudes).
double fluctuation_k(const correlation_matrix& c, const pair_amplitudes& p);

// Standard deviation of the fluctuating part of alpha: 4 gamma |dg| K.
double fluctuation_std(const correlation_matrix& c, double delta_g, const pair_amplitudes& p,
                       double gamma);

// |dg| f(N, b) / (4 K); nullopt marks the noise-free case K = 0, where the
// caller falls back to shot noise.
std::optional<double> snr_under_noise(double delta_g, int n_atoms, double b, double k);

// One Gaussian fluctuation vector with covariance C (eigen square root).
dvec sample_fluctuations(const correlation_matrix& c, counter_rng& rng);

// N x N numeric grid, comma or whitespace separated, optional header row.
correlation_matrix load_correlation_csv(const std::string& path);

}  // namespace demsim
