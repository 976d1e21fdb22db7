#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>

#include "demsim/noise.hpp"
#include "demsim/signal.hpp"

using namespace demsim;

namespace {
constexpr double inv_sqrt2 = 0.70710678118654752440;
}

TEST_CASE("covariance validation") {
    CHECK_THROWS_AS(correlation_matrix(dmat::Identity(3, 3)), std::invalid_argument);  // odd
    dmat asym = dmat::Identity(4, 4);
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS(correlation_matrix{asym}, std::invalid_argument);
    dmat indef = dmat::Identity(4, 4);
    indef(0, 1) = indef(1, 0) = 2.0;  // eigenvalue -1
    CHECK_THROWS_AS(correlation_matrix{indef}, std::invalid_argument);
    CHECK(correlation_matrix(dmat::Identity(4, 4)).n_atoms() == 4);
}

TEST_CASE("regime constructors and the silence condition") {
    correlation_matrix c1 = make_correlation(correlation_case::uncorrelated, 8, 0.3);
    CHECK(c1.c.isApprox(0.3 * dmat::Identity(8, 8)));
    CHECK_FALSE(pairwise_cancellation_holds(c1, 1.0, 1.0));

    correlation_matrix c2 = make_correlation(correlation_case::pairwise_identical, 8, 0.3);
    CHECK(c2.c.isApprox(dmat::Constant(8, 8, 0.3)));
    CHECK(pairwise_cancellation_holds(c2, 1.0, 1.0));
    // a fully common fluctuation is silent only for equal reference couplings
    CHECK_FALSE(pairwise_cancellation_holds(c2, 1.2, 0.8));

    correlation_matrix c3 = make_correlation(correlation_case::intra_set, 8, 0.3);
    CHECK(c3.c.topLeftCorner(4, 4).isApprox(dmat::Constant(4, 4, 0.3)));
    CHECK(c3.c.topRightCorner(4, 4).isZero());
    CHECK_FALSE(pairwise_cancellation_holds(c3, 1.0, 1.0));

    // block constructor: partner pairs fluctuate identically, blocks repeat
    dmat block(2, 2);
    block << 0.5, 0.2, 0.2, 0.4;
    correlation_matrix cp = make_correlation_pairwise(block);
    CHECK(cp.n_atoms() == 4);
    CHECK(cp.c.topLeftCorner(2, 2).isApprox(block));
    CHECK(cp.c.bottomRightCorner(2, 2).isApprox(block));
    CHECK(cp.c.topRightCorner(2, 2).isApprox(block));
    CHECK(pairwise_cancellation_holds(cp, 1.0, 1.0));
}

TEST_CASE("background offset") {
    // uncorrelated: M_ii = 2 c_var, background = gamma 2 c_var sum |b_i|^2
    correlation_matrix c1 = make_correlation(correlation_case::uncorrelated, 8, 0.3);
    std::vector<std::complex<double>> b(4, inv_sqrt2);
    CHECK(background_alpha(c1, b, 2.0) == doctest::Approx(2.0 * 2.0 * 0.3 * 2.0).epsilon(1e-13));
    correlation_matrix c2 = make_correlation(correlation_case::pairwise_identical, 8, 0.3);
    CHECK(background_alpha(c2, b, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("fluctuation spread closed forms") {
    // uncorrelated: K = sqrt(N) (N+2)/8 at a = b = 1/sqrt2, c_var = 1
    for (int n : {8, 16, 32}) {
        correlation_matrix c = make_correlation(correlation_case::uncorrelated, n, 1.0);
        pair_amplitudes p = pair_amplitudes::uniform(n / 2, inv_sqrt2, inv_sqrt2);
        CHECK(fluctuation_k(c, p) ==
              doctest::Approx(std::sqrt(2.0 * (n / 2.0)) * (n + 2.0) / 8.0).epsilon(1e-12));
    }

    // pairwise identical: exactly zero
    correlation_matrix c2 = make_correlation(correlation_case::pairwise_identical, 8, 1.0);
    pair_amplitudes p8 = pair_amplitudes::uniform(4, inv_sqrt2, inv_sqrt2);
    CHECK(fluctuation_k(c2, p8) == 0.0);
    CHECK(fluctuation_std(c2, 0.05, p8, 1.0) == 0.0);
    CHECK_FALSE(snr_under_noise(0.05, 8, inv_sqrt2, fluctuation_k(c2, p8)).has_value());

    // intra-set: K = sqrt(2) (N/2) S, and the resulting SNR is N-independent
    double prev = -1.0;
    for (int n : {8, 16, 32}) {
        correlation_matrix c3 = make_correlation(correlation_case::intra_set, n, 1.0);
        pair_amplitudes p = pair_amplitudes::uniform(n / 2, inv_sqrt2, inv_sqrt2);
        double k = fluctuation_k(c3, p);
        CHECK(k == doctest::Approx(std::sqrt(2.0) * (n / 2.0) * (n + 2.0) / 8.0).epsilon(1e-12));
        auto snr = snr_under_noise(0.05, n, inv_sqrt2, k);
        REQUIRE(snr.has_value());
        CHECK(*snr == doctest::Approx(0.05 / std::sqrt(2.0)).epsilon(1e-12));
        if (prev > 0.0) CHECK(*snr == doctest::Approx(prev).epsilon(1e-12));
        prev = *snr;
    }

    // snr definition: |dg| f / (4K)
    CHECK(*snr_under_noise(0.1, 8, inv_sqrt2, 2.5) == doctest::Approx(0.1 * 20.0 / 10.0).epsilon(1e-13));
}

TEST_CASE("sampled fluctuations track the linearized spread") {
    // draw coupling perturbations, evaluate the closed-form rate, compare the
    // sample std against 4 gamma |dg| K in the small-variance linear regime
    int n = 8;
    double c_var = 1e-8, g1 = 1.05, g2 = 0.95, gamma = 1.0;
    correlation_matrix c = make_correlation(correlation_case::uncorrelated, n, c_var);
    pair_amplitudes p = pair_amplitudes::uniform(n / 2, inv_sqrt2, inv_sqrt2);

    counter_rng rng(555, 0);
    long samples = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (long s = 0; s < samples; ++s) {
        dvec d = sample_fluctuations(c, rng);
        cvec g(n);
        for (int i = 0; i < n; ++i) g[i] = (i < n / 2 ? g1 : g2) + d[i];
        double a = alpha_pair_closed_form(p, coupling_config(g, gamma));
        sum += a;
        sum2 += a * a;
    }
    double mean = sum / samples;
    double var = (sum2 - samples * mean * mean) / (samples - 1.0);
    double predicted = fluctuation_std(c, 0.5 * (g1 - g2), p, gamma);
    CHECK(std::sqrt(var) == doctest::Approx(predicted).epsilon(0.05));
}

TEST_CASE("covariance file loading") {
    const char* path = "corr_unit_test.csv";
    {
        std::ofstream f(path);
        f << "# test matrix\n";
        f << "c0,c1,c2,c3\n";
        f << "1.0,0.0,0.5,0.0\n0.0,1.0,0.0,0.5\n0.5,0.0,1.0,0.0\n0.0,0.5,0.0,1.0\n";
    }
    correlation_matrix c = load_correlation_csv(path);
    CHECK(c.n_atoms() == 4);
    CHECK(c.c(0, 2) == doctest::Approx(0.5));
    CHECK(c.c(3, 3) == doctest::Approx(1.0));
    std::remove(path);

    {
        std::ofstream f(path);
        f << "1.0 0.0\n0.5 1.0\n";  // asymmetric
    }
    CHECK_THROWS(load_correlation_csv(path));
    std::remove(path);
    CHECK_THROWS(load_correlation_csv("no_such_file.csv"));
}
