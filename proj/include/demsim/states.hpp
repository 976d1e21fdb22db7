#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "demsim/hilbert.hpp"
#include "demsim/rng.hpp"

namespace demsim {

// Per-pair coefficients (a, b, c, d) over the pair basis
// {|t-> = |00>, |s>, |t0> = (|01>+|10>)/sqrt2, |t+> = |11>}.
// Pair l couples atom l with atom l+N/2; |s> is the standard or, when built
// against reference couplings, the generalized singlet of that pair.
struct pair_amplitudes {
    std::vector<std::array<std::complex<double>, 4>> coeff;

    explicit pair_amplitudes(std::vector<std::array<std::complex<double>, 4>> c);
    static pair_amplitudes uniform(int n_pairs, std::complex<double> a, std::complex<double> b,
                                   std::complex<double> c = 0.0, std::complex<double> d = 0.0);

    int n_pairs() const { return static_cast<int>(coeff.size()); }
    int n_atoms() const { return 2 * n_pairs(); }
    bool singlet_span_only(double tol = 1e-12) const;  // true when all c = d = 0
};

// Product of per-pair states with c = d = 0, the singlet generalized by the
// reference couplings c0: (g_l|01> - g_{l+N/2}|10>)/sqrt(|g_l|^2+|g_{l+N/2}|^2).
// The result is annihilated by J- under c0.
quantum_state pair_product_state(const pair_amplitudes& p, const coupling_config& c0);

// Same per-pair state a|t-> + b|s> + c|t0> + d|t+> for every pair, standard
// singlet (equal reference couplings).
quantum_state imperfect_pair_state(std::complex<double> a, std::complex<double> b,
                                   std::complex<double> c, std::complex<double> d, int n_atoms);

// Condon-Shortley coefficient <j1 m1; j2 m2 | J M>. Arguments violating the
// selection rules give 0. Half-integers allowed; values cached per (j1,j2,J).
double clebsch_gordan(double j1, double m1, double j2, double m2, double big_j, double big_m);

// Two sets of collective pseudo-angular momentum ell coupled to total j.
struct cat_state_spec {
    double ell;  // per-set angular momentum, half-integer allowed
    int j;       // total angular momentum, 0 <= j <= 2 ell

    cat_state_spec(double ell_, int j_);
    int per_set_dim() const { return static_cast<int>(2.0 * ell + 1.5); }
    Eigen::Index dim() const { return Eigen::Index{1} * per_set_dim() * per_set_dim(); }
    // row-major index of |m1, m2>, m stored ascending from -ell
    Eigen::Index index(double m1, double m2) const;
};

// |(ell,ell) j, -j> in the coupled (m1, m2) basis; real amplitudes.
dvec cat_state(const cat_state_spec& spec);

// <J1+ J1-> on the cat state, closed form
// |G1|^2 (2j+1)(2j+2)/(4(j+1)^2-1) [ell(ell+1) - j(j+2)/4].
double cat_expect_j1pj1m(const cat_state_spec& spec, double g1);

// Same expectation summed directly over the coupled basis.
double cat_expect_j1pj1m_brute(const cat_state_spec& spec, double g1);

// Orthonormal basis of the kernel of J- under c0, found sector-by-sector in
// excitation number. C(N, N/2) states for generic nonzero couplings. N <= 14.
std::vector<quantum_state> dfs_basis(int n_atoms, const coupling_config& c0);

// Haar-random unit vector in the span of a precomputed dark basis.
quantum_state random_dfs_state(const std::vector<quantum_state>& basis, counter_rng& rng);
quantum_state random_dfs_state(int n_atoms, const coupling_config& c0, std::uint64_t seed);

}  // namespace demsim
