#include <doctest.h>

#include <cmath>
#include <complex>

#include "demsim/rng.hpp"
#include "demsim/signal.hpp"

using namespace demsim;

namespace {
constexpr double inv_sqrt2 = 0.70710678118654752440;
}

TEST_CASE("count statistics and validity window") {
    signal_result r = make_signal_result(0.04, 1.0);
    CHECK(r.n_ph_expected == doctest::Approx(0.04));
    CHECK(r.snr == doctest::Approx(0.2));
    CHECK_FALSE(r.outside_validity_window);
    CHECK(make_signal_result(0.2, 1.0).outside_validity_window);
    CHECK(make_signal_result(0.05, 2.0).outside_validity_window);  // n_ph = 0.1 boundary
    CHECK_THROWS_AS(make_signal_result(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_signal_result(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("rate-hierarchy check") {
    regime_check ok = check_regime(0.001, 1.0, 100.0, 16);
    CHECK(ok.pass);
    CHECK(ok.ratio_lower == doctest::Approx(0.00025));
    CHECK(ok.ratio_upper == doctest::Approx(0.04));
    CHECK_FALSE(check_regime(1.0, 1.0, 100.0, 16).pass);   // big_gamma too large
    CHECK_FALSE(check_regime(0.001, 1.0, 10.0, 16).pass);  // kappa too small
}

TEST_CASE("collective rate ground truth") {
    coupling_config two = coupling_config::two_set(4, 1.1, 0.9);
    quantum_state dark = imperfect_pair_state(inv_sqrt2, inv_sqrt2, 0.0, 0.0, 4);
    CHECK(alpha_collective(dark, coupling_config::uniform(4)) < 1e-24);
    CHECK(alpha_collective(dark, two) == doctest::Approx(0.06).epsilon(1e-12));

    // N=2 in units gamma (g1-g2)^2: 1/2
    quantum_state d2 = imperfect_pair_state(inv_sqrt2, inv_sqrt2, 0.0, 0.0, 2);
    coupling_config c2 = coupling_config::two_set(2, 1.1, 0.9);
    CHECK(alpha_collective(d2, c2) / (0.2 * 0.2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("signal factor") {
    CHECK(f_factor(2, inv_sqrt2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f_factor(4, inv_sqrt2) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(f_factor(8, inv_sqrt2) == doctest::Approx(20.0).epsilon(1e-14));
    CHECK(f_factor(6, 0.0) == 0.0);
    CHECK_THROWS_AS(f_factor(3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(f_factor(4, 1.5), std::invalid_argument);
}

TEST_CASE("pair-state closed form equals state vectors") {
    // uniform amplitudes reduce to gamma dg^2 f(N, b)
    for (int n : {2, 4, 6, 8}) {
        pair_amplitudes p = pair_amplitudes::uniform(n / 2, 0.6, 0.8);
        coupling_config c = coupling_config::two_set(n, 1.05, 0.95, 1.7);
        double closed = alpha_pair_closed_form(p, c);
        CHECK(closed == doctest::Approx(1.7 * 0.05 * 0.05 * f_factor(n, 0.8)).epsilon(1e-12));
        quantum_state psi = pair_product_state(p, coupling_config::uniform(n));
        CHECK(closed == doctest::Approx(alpha_collective(psi, c)).epsilon(1e-10));
    }

    // all-ground pairs emit nothing
    CHECK(alpha_pair_closed_form(pair_amplitudes::uniform(2, 1.0, 0.0), coupling_config::uniform(4)) == 0.0);

    // single surviving diagonal term: gamma |1.2 - 0.8|^2 = 0.16
    pair_amplitudes mixed({{{0.0, 1.0, 0.0, 0.0}}, {{1.0, 0.0, 0.0, 0.0}}});
    cvec g(4);
    g << 1.2, 1.0, 0.8, 1.0;
    coupling_config cw(g);
    CHECK(alpha_pair_closed_form(mixed, cw) == doctest::Approx(0.16).epsilon(1e-12));
    quantum_state psi = pair_product_state(mixed, coupling_config::uniform(4));
    CHECK(alpha_collective(psi, cw) == doctest::Approx(0.16).epsilon(1e-12));

    // random instances against brute force, generalized singlets and random couplings
    counter_rng rng(2024, 0);
    for (int rep = 0; rep < 40; ++rep) {
        int n = 2 * (1 + static_cast<int>(rng.uniform() * 4.99));  // N in 2..10
        std::vector<std::array<std::complex<double>, 4>> coeff(n / 2);
        for (auto& pc : coeff) {
            std::complex<double> a{rng.gaussian(), rng.gaussian()}, b{rng.gaussian(), rng.gaussian()};
            double norm = std::sqrt(std::norm(a) + std::norm(b));
            pc = {a / norm, b / norm, 0.0, 0.0};
        }
        cvec gr(n);
        for (int i = 0; i < n; ++i) gr[i] = 0.5 + rng.uniform();
        coupling_config base = coupling_config::uniform(n);
        coupling_config meas(gr, 0.5 + rng.uniform());
        pair_amplitudes p(coeff);
        double closed = alpha_pair_closed_form(p, meas);
        double brute = alpha_collective(pair_product_state(p, base), meas);
        CHECK(closed == doctest::Approx(brute).epsilon(1e-10));
    }
}

TEST_CASE("four-component count and the d^2 form comparison") {
    CHECK(n_ph_imperfect(1, 0, 0, 0, 4, 1.1, 0.9, 1.0, 1.0).n_ph == doctest::Approx(0.0));

    // c = d = 0 reduces to gamma dt dg^2 f
    imperfect_count r = n_ph_imperfect(0.6, 0.8, 0, 0, 6, 1.05, 0.95, 2.0, 0.5);
    CHECK(r.n_ph == doctest::Approx(2.0 * 0.5 * 0.0025 * f_factor(6, 0.8)).epsilon(1e-12));
    CHECK(r.alpha_form_2d2 == doctest::Approx(r.alpha_brute).epsilon(1e-12));
    CHECK(r.alpha_form_d2 == doctest::Approx(r.alpha_brute).epsilon(1e-12));  // d = 0: forms agree

    // fully excited: alpha = 2 gamma (N/2)(g1^2+g2^2)
    imperfect_count full = n_ph_imperfect(0, 0, 0, 1, 4, 1.0, 1.0, 1.0, 1.0);
    CHECK(full.n_ph == doctest::Approx(8.0).epsilon(1e-12));

    // d != 0: the doubled-d^2 form tracks the state vector, the other is off by
    // exactly gamma (N/2) d^2 (g1^2 + g2^2)
    double a = 0.5, b = 0.5, c = 0.5, d = 0.5;
    imperfect_count m = n_ph_imperfect(a, b, c, d, 6, 1.2, 0.8, 1.3, 1.0);
    CHECK(m.alpha_form_2d2 == doctest::Approx(m.alpha_brute).epsilon(1e-10));
    double gap = 1.3 * 3.0 * d * d * (1.2 * 1.2 + 0.8 * 0.8);
    CHECK(m.alpha_brute - m.alpha_form_d2 == doctest::Approx(gap).epsilon(1e-10));

    CHECK_THROWS_AS(n_ph_imperfect(1, 1, 0, 0, 4, 1, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("coupled-singlet count closed form") {
    CHECK(n_ph_cat(4, 0.1, 1.0, 1.0) == doctest::Approx(0.01 * 32.0 / 3.0).epsilon(1e-13));
    CHECK(n_ph_cat(8, 0.1, 1.0, 1.0) == doctest::Approx(0.32).epsilon(1e-13));
    CHECK(n_ph_cat(8, 0.0, 1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(n_ph_cat(6, 0.1, 1.0, 1.0), std::invalid_argument);

    // identity against the coupled-basis sum: n_ph = 2 gamma dt 4 dg^2 <J1+J1->
    for (int n : {4, 8, 12}) {
        cat_state_spec spec(0.25 * n, 0);
        double brute = 2.0 * 1.0 * 4.0 * 0.01 * cat_expect_j1pj1m_brute(spec, 1.0);
        CHECK(n_ph_cat(n, 0.1, 1.0, 1.0) == doctest::Approx(brute).epsilon(1e-10));
    }
}

TEST_CASE("spontaneous side channel") {
    std::vector<std::complex<double>> b4(4, inv_sqrt2);
    CHECK(alpha_spontaneous(b4, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(alpha_spontaneous(std::vector<std::complex<double>>(4, 0.0), 1.0) == 0.0);
    CHECK(alpha_spontaneous({1.0}, 0.7) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("shot-noise ratio and smallest resolvable coupling shift") {
    CHECK(shot_noise_snr(0.0) == 0.0);
    CHECK(shot_noise_snr(0.04) == doctest::Approx(0.2).epsilon(1e-14));

    // snr = |dg| sqrt(gamma dt) sqrt(f)
    double dg = 0.05, gamma = 1.0, dt = 1.0;
    double n_ph = gamma * dt * dg * dg * f_factor(8, inv_sqrt2);
    CHECK(shot_noise_snr(n_ph) == doctest::Approx(dg * std::sqrt(gamma * dt * f_factor(8, inv_sqrt2))));

    CHECK(min_detectable_delta_g(8, inv_sqrt2, 1.0, 1.0, 1.0) ==
          doctest::Approx(1.0 / std::sqrt(20.0)).epsilon(1e-14));
    // asymptotic 1/N: quadrupling N at large N roughly halves twice
    double r = min_detectable_delta_g(256, inv_sqrt2, 1, 1, 1) / min_detectable_delta_g(1024, inv_sqrt2, 1, 1, 1);
    CHECK(r == doctest::Approx(4.0).epsilon(0.02));
    CHECK_THROWS_AS(min_detectable_delta_g(4, 0.0, 1.0, 1.0, 1.0), std::invalid_argument);
}
