#pragma once

#include "demsim/hilbert.hpp"
#include "demsim/states.hpp"

namespace demsim {

// Emission rate alpha plus the derived count statistics for a window delta_t.
// The approach assumes <n_ph> << 1; outside_validity_window flags runs where
// n_ph_expected >= 0.1 instead of failing them.
struct signal_result {
    double alpha = 0.0;
    double n_ph_expected = 0.0;
    double delta_t = 0.0;
    double snr = 0.0;
    bool outside_validity_window = false;
};

signal_result make_signal_result(double alpha, double delta_t);

// Bad-cavity hierarchy big_gamma << g sqrt(N) << kappa, with "<<" taken as
// ratio <= 0.1.
struct regime_check {
    double big_gamma = 0.0;
    double g_rms = 0.0;
    double kappa = 0.0;
    int n_atoms = 0;
    double ratio_lower = 0.0;  // big_gamma / (g sqrt(N))
    double ratio_upper = 0.0;  // g sqrt(N) / kappa
    bool pass = false;
};

regime_check check_regime(double big_gamma, double g_rms, double kappa, int n_atoms);

// alpha = -<dJz/dt> under collective decay = 2 gamma ||J- psi||^2. Ground
// truth for every closed form below.
double alpha_collective(const quantum_state& psi, const coupling_config& c);

// f(N, b) = 4|b|^2 [N/2 + (N/2)(N/2-1)(1-|b|^2)].
double f_factor(int n_atoms, double b);

// Pair-state emission rate without state vectors:
// gamma [sum_i |g_i - g_{i+N/2}|^2 |b_i|^2
//        + sum_{i != j} (g_i - g_{i+N/2})* (g_j - g_{j+N/2}) b_i* b_j a_i a_j*]
// for states built from standard singlets and measured under c.
double alpha_pair_closed_form(const pair_amplitudes& p, const coupling_config& c);

// Photon count for the uniform imperfect pair state under two-set couplings.
// The state-vector value is authoritative; two closed forms are carried for
// comparison because they disagree by a factor 2 in the d^2 (G1^2 + G2^2)
// term. The doubled variant matches the state vector.
struct imperfect_count {
    double n_ph = 0.0;           // delta_t * alpha_brute
    double alpha_brute = 0.0;    // from the state vector
    double alpha_form_2d2 = 0.0; // closed form with 2 d^2 (G1^2 + G2^2)
    double alpha_form_d2 = 0.0;  // closed form with d^2 (G1^2 + G2^2)
    double delta_t = 0.0;
};

imperfect_count n_ph_imperfect(double a, double b, double c, double d, int n_atoms, double g1,
                               double g2, double gamma, double delta_t);

// <n_ph> = (gamma delta_t / 3) |dg|^2 N (N + 4) for the j = 0 cat state of
// two sets with maximal per-set angular momentum ell = N/4.
double n_ph_cat(int n_atoms, double delta_g, double gamma, double delta_t);

// Spontaneous contribution big_gamma * sum_i |b_i|^2; emitted out the side of
// the cavity, reported separately from the collective signal.
double alpha_spontaneous(const std::vector<std::complex<double>>& b_weights, double big_gamma);

// sigma(n_ph) ~ sqrt(<n_ph>) in the rare-count window.
double shot_noise_snr(double n_ph_expected);

// Smallest |dg| giving the target SNR: snr_target / (sqrt(gamma dt) sqrt(f)).
double min_detectable_delta_g(int n_atoms, double b, double gamma, double delta_t, double snr_target);

// dL/L from a measured count through the mode-geometry chain
// dg = m pi cot(n_x pi x1/L) dL/L and <n_ph> = gamma dt dg^2 f(N,b).
double delta_l_inversion(double n_ph_measured, double gamma, double delta_t, int m, int n_x,
                         double x1_over_l, int n_atoms, double b);

}  // namespace demsim
