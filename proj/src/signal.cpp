#include "demsim/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace demsim {

signal_result make_signal_result(double alpha, double delta_t) {
    if (alpha < 0.0) throw std::invalid_argument("alpha must be nonnegative");
    if (!(delta_t > 0.0)) throw std::invalid_argument("delta_t must be positive");
    signal_result r;
    r.alpha = alpha;
    r.delta_t = delta_t;
    r.n_ph_expected = alpha * delta_t;
    r.snr = std::sqrt(r.n_ph_expected);
    r.outside_validity_window = r.n_ph_expected >= 0.1;
    return r;
}

regime_check check_regime(double big_gamma, double g_rms, double kappa, int n_atoms) {
    if (big_gamma < 0.0 || !(g_rms > 0.0) || !(kappa > 0.0) || n_atoms < 1)
        throw std::invalid_argument("regime parameters out of range");
    regime_check r;
    r.big_gamma = big_gamma;
    r.g_rms = g_rms;
    r.kappa = kappa;
    r.n_atoms = n_atoms;
    double mid = g_rms * std::sqrt(static_cast<double>(n_atoms));
    r.ratio_lower = big_gamma / mid;
    r.ratio_upper = mid / kappa;
    r.pass = r.ratio_lower <= 0.1 && r.ratio_upper <= 0.1;
    return r;
}

double alpha_collective(const quantum_state& psi, const coupling_config& c) {
    return 2.0 * c.gamma * expect_jplus_jminus(psi, c);
}

double f_factor(int n_atoms, double b) {
    if (n_atoms < 2 || n_atoms % 2 != 0) throw std::invalid_argument("n_atoms must be even and >= 2");
    double ab = std::abs(b);
    if (ab > 1.0 + 1e-12) throw std::invalid_argument("|b| must be <= 1");
    double half = 0.5 * n_atoms;
    return 4.0 * ab * ab * (half + half * (half - 1.0) * (1.0 - ab * ab));
}

double alpha_pair_closed_form(const pair_amplitudes& p, const coupling_config& c) {
    if (!p.singlet_span_only()) throw std::invalid_argument("closed form needs c = d = 0");
    const int n_pairs = p.n_pairs();
    if (p.n_atoms() != c.n_atoms()) throw std::invalid_argument("pair/coupling size mismatch");
    std::vector<std::complex<double>> dg(n_pairs);
    for (int i = 0; i < n_pairs; ++i) dg[i] = c.g_tilde[i] - c.g_tilde[i + n_pairs];

    double diag = 0.0;
    std::complex<double> cross = 0.0;
    // sum_{i != j} dg_i* dg_j b_i* b_j a_i a_j* done as |sum|^2 minus diagonal
    std::complex<double> s = 0.0;
    for (int i = 0; i < n_pairs; ++i) {
        std::complex<double> a = p.coeff[i][0];
        std::complex<double> b = p.coeff[i][1];
        diag += std::norm(dg[i]) * std::norm(b);
        s += dg[i] * b * std::conj(a);
        cross -= std::norm(dg[i] * b * std::conj(a));
    }
    cross += std::norm(s);
    return c.gamma * (diag + cross.real());
}

imperfect_count n_ph_imperfect(double a, double b, double c, double d, int n_atoms, double g1,
                               double g2, double gamma, double delta_t) {
    if (!(delta_t > 0.0)) throw std::invalid_argument("delta_t must be positive");
    quantum_state psi = imperfect_pair_state(a, b, c, d, n_atoms);
    coupling_config cc = coupling_config::two_set(n_atoms, g1, g2, gamma);

    imperfect_count out;
    out.delta_t = delta_t;
    out.alpha_brute = alpha_collective(psi, cc);
    out.n_ph = delta_t * out.alpha_brute;

    double half = 0.5 * n_atoms;
    double t1 = b * (g2 - g1) + c * (g1 + g2);
    double t2 = (g2 - g1) * b * (a - d) + (g1 + g2) * c * (a + d);
    double dd = d * d * (g1 * g1 + g2 * g2);
    out.alpha_form_2d2 = gamma * (half * (t1 * t1 + 2.0 * dd) + half * (half - 1.0) * t2 * t2);
    out.alpha_form_d2 = gamma * (half * (t1 * t1 + dd) + half * (half - 1.0) * t2 * t2);
    return out;
}

double n_ph_cat(int n_atoms, double delta_g, double gamma, double delta_t) {
    if (n_atoms < 4 || n_atoms % 4 != 0) throw std::invalid_argument("n_atoms must be a positive multiple of 4");
    double n = n_atoms;
    return (gamma * delta_t / 3.0) * delta_g * delta_g * n * (n + 4.0);
}

double alpha_spontaneous(const std::vector<std::complex<double>>& b_weights, double big_gamma) {
    if (big_gamma < 0.0) throw std::invalid_argument("big_gamma must be nonnegative");
    double s = 0.0;
    for (const auto& b : b_weights) s += std::norm(b);
    return big_gamma * s;
}

double shot_noise_snr(double n_ph_expected) {
    if (n_ph_expected < 0.0) throw std::invalid_argument("negative count");
    return std::sqrt(n_ph_expected);
}

double min_detectable_delta_g(int n_atoms, double b, double gamma, double delta_t, double snr_target) {
    if (!(gamma > 0.0) || !(delta_t > 0.0) || !(snr_target > 0.0))
        throw std::invalid_argument("rates and target must be positive");
    double f = f_factor(n_atoms, b);
    if (f <= 0.0) throw std::invalid_argument("state is insensitive: f(N, b) = 0");
    return snr_target / (std::sqrt(gamma * delta_t) * std::sqrt(f));
}

double delta_l_inversion(double n_ph_measured, double gamma, double delta_t, int m, int n_x,
                         double x1_over_l, int n_atoms, double b) {
    if (n_ph_measured < 0.0) throw std::invalid_argument("negative count");
    if (!(gamma > 0.0) || !(delta_t > 0.0)) throw std::invalid_argument("rates must be positive");
    if (m < 1 || n_x < 2 || m > n_x - 1) throw std::invalid_argument("need 1 <= m <= n_x - 1");
    if (!(x1_over_l > 0.0) || !(x1_over_l < 1.0)) throw std::invalid_argument("x1 must lie inside the cavity");
    double f = f_factor(n_atoms, b);
    if (f <= 0.0) throw std::invalid_argument("state is insensitive: f(N, b) = 0");
    double phase = n_x * M_PI * x1_over_l;
    double c = std::cos(phase), s = std::sin(phase);
    if (std::abs(s) < 1e-12) throw std::invalid_argument("degenerate geometry: lattice at a node");
    if (std::abs(c) < 1e-12) throw std::invalid_argument("degenerate geometry: lattice at an antinode");
    double cot = c / s;
    double k = m * M_PI * cot;
    return std::sqrt(n_ph_measured / (gamma * delta_t * k * k * f));
}

}  // namespace demsim
