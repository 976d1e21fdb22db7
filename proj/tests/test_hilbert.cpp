#include <doctest.h>

#include <complex>

#include "demsim/hilbert.hpp"
#include "demsim/rng.hpp"

using namespace demsim;

namespace {

quantum_state random_state(int n, std::uint64_t seed) {
    counter_rng rng(seed, 0);
    cvec a(Eigen::Index{1} << n);
    for (Eigen::Index k = 0; k < a.size(); ++k) a[k] = {rng.gaussian(), rng.gaussian()};
    return quantum_state(n, std::move(a));
}

}  // namespace

TEST_CASE("state construction normalizes and validates") {
    cvec a(4);
    a << 3.0, 0.0, 4.0, 0.0;
    quantum_state psi(2, a);
    CHECK(psi.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(psi.dim() == 4);

    CHECK_THROWS_AS(quantum_state(2, cvec::Zero(4)), std::invalid_argument);
    CHECK_THROWS_AS(quantum_state(2, cvec::Ones(8)), std::invalid_argument);
    CHECK_THROWS_AS(quantum_state(0, cvec::Ones(1)), std::invalid_argument);
    CHECK_THROWS_AS(quantum_state::basis_state(2, 4), std::out_of_range);
}

TEST_CASE("coupling validation and set accessors") {
    CHECK_THROWS_AS(coupling_config(cvec::Ones(2), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(coupling_config(cvec::Ones(2), 1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(coupling_config::two_set(3, 1.0, 1.0), std::invalid_argument);

    coupling_config c = coupling_config::two_set(4, 1.05, 0.95);
    CHECK(c.g1() == doctest::Approx(1.05));
    CHECK(c.g2() == doctest::Approx(0.95));
    CHECK(c.delta_g() == doctest::Approx(0.05));
    CHECK(c.is_real());

    cvec mixed(4);
    mixed << 1.0, 2.0, 1.0, 1.0;  // set 1 not uniform
    CHECK_THROWS_AS(coupling_config(mixed).g1(), std::logic_error);
}

TEST_CASE("lowering operator on small cases") {
    // single lowering: |1> -> |0>
    coupling_config c1(cvec::Ones(1));
    cvec out1 = apply_j_minus(quantum_state::basis_state(1, 1), c1);
    CHECK(std::abs(out1[0] - 1.0) < 1e-15);
    CHECK(std::abs(out1[1]) < 1e-15);

    // uniform singlet is dark
    cvec s(4);
    s << 0.0, 1.0, -1.0, 0.0;
    quantum_state singlet(2, s);
    CHECK(apply_j_minus(singlet, coupling_config::uniform(2)).norm() < 1e-12);

    // weighted couplings leak the singlet into |00> with weight (g1-g2)/sqrt(2)
    coupling_config cw = coupling_config::two_set(2, 1.1, 0.9);
    cvec leak = apply_j_minus(singlet, cw);
    CHECK(std::abs(leak[0] - std::complex<double>(0.2 / std::sqrt(2.0))) < 1e-14);
    CHECK(leak.tail(3).norm() < 1e-15);

    CHECK_THROWS_AS(apply_j_minus(singlet, c1), std::invalid_argument);
}

TEST_CASE("raising operator and adjoint identity") {
    coupling_config c = coupling_config::uniform(2);
    cvec up = apply_j_plus(quantum_state::basis_state(2, 0), c);
    CHECK(std::abs(up[1] - 1.0) < 1e-15);
    CHECK(std::abs(up[2] - 1.0) < 1e-15);
    CHECK(apply_j_plus(quantum_state::basis_state(2, 3), c).norm() < 1e-15);

    // <phi|J- psi> == <J+ phi|psi> on random states
    coupling_config cr = coupling_config::two_set(6, 1.2, 0.8);
    quantum_state psi = random_state(6, 11);
    quantum_state phi = random_state(6, 12);
    std::complex<double> lhs = phi.amplitudes().dot(apply_j_minus(psi, cr));
    std::complex<double> rhs = apply_j_plus(phi, cr).dot(psi.amplitudes());
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("quadratic expectation against dense matrix") {
    coupling_config c = coupling_config::two_set(4, 1.3, 0.7, 2.0);
    quantum_state psi = random_state(4, 21);

    cmat jm = j_minus_matrix(c);
    double dense = (jm * psi.amplitudes()).squaredNorm();
    CHECK(expect_jplus_jminus(psi, c) == doctest::Approx(dense).epsilon(1e-12));

    // fully excited: (N/2)(g1^2 + g2^2)
    quantum_state full = quantum_state::basis_state(4, 15);
    CHECK(expect_jplus_jminus(full, c) == doctest::Approx(2.0 * (1.3 * 1.3 + 0.7 * 0.7)).epsilon(1e-14));
    CHECK(expect_jplus_jminus(full, coupling_config::uniform(4)) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("inversion expectation") {
    CHECK(expect_jz(quantum_state::basis_state(4, 0)) == doctest::Approx(-2.0));
    CHECK(expect_jz(quantum_state::basis_state(4, 15)) == doctest::Approx(2.0));
    cvec s(4);
    s << 0.0, 1.0, -1.0, 0.0;
    CHECK(expect_jz(quantum_state(2, s)) == doctest::Approx(0.0));
}

TEST_CASE("ladder commutator and linearity") {
    coupling_config c = coupling_config::two_set(6, 1.1, 0.9);
    quantum_state psi = random_state(6, 31);

    // Jz(J- psi) - J-(Jz psi) = -J- psi, with Jz diagonal popcount - N/2 applied in place
    cvec jm = apply_j_minus(psi, c);
    cvec jz_jm(jm.size()), jz_psi(jm.size());
    for (Eigen::Index k = 0; k < jm.size(); ++k) {
        double jz = __builtin_popcountll(static_cast<unsigned long long>(k)) - 3.0;
        jz_jm[k] = jz * jm[k];
        jz_psi[k] = jz * psi.amplitudes()[k];
    }
    cvec jm_jz(jm.size());
    apply_j_minus_raw(jz_psi, c.g_tilde, jm_jz);
    CHECK((jz_jm - jm_jz + jm).norm() < 1e-12);

    // linearity on raw vectors
    quantum_state phi = random_state(6, 32);
    cvec combo = 0.3 * psi.amplitudes() + std::complex<double>(0.0, 0.7) * phi.amplitudes();
    cvec lhs(combo.size());
    apply_j_minus_raw(combo, c.g_tilde, lhs);
    cvec rhs = 0.3 * apply_j_minus(psi, c) + std::complex<double>(0.0, 0.7) * apply_j_minus(phi, c);
    CHECK((lhs - rhs).norm() < 1e-12);
}
