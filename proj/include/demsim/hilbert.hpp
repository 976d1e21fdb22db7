#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace demsim {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using dvec = Eigen::VectorXd;
using dmat = Eigen::MatrixXd;

// Pure state of n_atoms two-level atoms. Basis index k is a little-endian
// bitstring: bit i of k is the excitation of atom i. Normalized on
// construction; immutable afterwards.
class quantum_state {
public:
    quantum_state(int n_atoms, cvec amplitudes);
    static quantum_state basis_state(int n_atoms, std::uint64_t bits);

    int n_atoms() const { return n_atoms_; }
    Eigen::Index dim() const { return amp_.size(); }
    const cvec& amplitudes() const { return amp_; }

private:
    int n_atoms_;
    cvec amp_;
};

// Per-atom weights of the collective lowering operator plus the two decay
// rates. Atoms 0..N/2-1 form set 1, atoms N/2..N-1 set 2; the set accessors
// are defined only when couplings are uniform within each set.
struct coupling_config {
    cvec g_tilde;
    double gamma = 1.0;      // collective rate
    double big_gamma = 0.0;  // individual spontaneous rate

    coupling_config(cvec g, double gamma_ = 1.0, double big_gamma_ = 0.0);
    static coupling_config uniform(int n_atoms, double g = 1.0, double gamma_ = 1.0,
                                   double big_gamma_ = 0.0);
    static coupling_config two_set(int n_atoms, double g1, double g2, double gamma_ = 1.0,
                                   double big_gamma_ = 0.0);

    int n_atoms() const { return static_cast<int>(g_tilde.size()); }
    bool is_real() const;
    double g1() const;                              // set-1 coupling
    double g2() const;                              // set-2 coupling
    double delta_g() const { return 0.5 * (g1() - g2()); }
};

// J- = sum_i g_i sigma-^(i) applied to |psi>; result is unnormalized.
cvec apply_j_minus(const quantum_state& psi, const coupling_config& c);
cvec apply_j_plus(const quantum_state& psi, const coupling_config& c);

// ||J- psi||^2; zero exactly when psi lies in the kernel of J-.
double expect_jplus_jminus(const quantum_state& psi, const coupling_config& c);

// <Jz> = (1/2) sum_i <2 n_i - 1>, in [-N/2, N/2].
double expect_jz(const quantum_state& psi);

// Raw kernels on amplitude vectors, for inner loops. out is overwritten and
// must already have the right size.
void apply_j_minus_raw(const cvec& in, const cvec& g, cvec& out);
void apply_j_plus_raw(const cvec& in, const cvec& g, cvec& out);

// Dense matrix of J-, debug path for small N (dim <= 2^14 guard).
cmat j_minus_matrix(const coupling_config& c);

}  // namespace demsim
