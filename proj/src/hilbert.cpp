#include "demsim/hilbert.hpp"

#include <stdexcept>

namespace demsim {

namespace {

Eigen::Index dim_for(int n_atoms) {
    if (n_atoms < 1 || n_atoms > 24) throw std::invalid_argument("n_atoms out of range");
    return Eigen::Index{1} << n_atoms;
}

void check_match(const quantum_state& psi, const coupling_config& c) {
    if (psi.n_atoms() != c.n_atoms()) throw std::invalid_argument("state/coupling size mismatch");
}

}  // namespace

quantum_state::quantum_state(int n_atoms, cvec amplitudes) : n_atoms_(n_atoms), amp_(std::move(amplitudes)) {
    if (amp_.size() != dim_for(n_atoms)) throw std::invalid_argument("amplitude vector has wrong length");
    double n = amp_.norm();
    if (n < 1e-14) throw std::invalid_argument("cannot normalize zero state");
    if (std::abs(n - 1.0) > 1e-12) amp_ /= n;
}

quantum_state quantum_state::basis_state(int n_atoms, std::uint64_t bits) {
    cvec a = cvec::Zero(dim_for(n_atoms));
    if (bits >= static_cast<std::uint64_t>(a.size())) throw std::out_of_range("basis index out of range");
    a[static_cast<Eigen::Index>(bits)] = 1.0;
    return quantum_state(n_atoms, std::move(a));
}

coupling_config::coupling_config(cvec g, double gamma_, double big_gamma_)
    : g_tilde(std::move(g)), gamma(gamma_), big_gamma(big_gamma_) {
    if (g_tilde.size() < 1) throw std::invalid_argument("empty coupling vector");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (big_gamma < 0.0) throw std::invalid_argument("big_gamma must be nonnegative");
}

coupling_config coupling_config::uniform(int n_atoms, double g, double gamma_, double big_gamma_) {
    if (n_atoms < 1) throw std::invalid_argument("n_atoms out of range");
    return coupling_config(cvec::Constant(n_atoms, g), gamma_, big_gamma_);
}

coupling_config coupling_config::two_set(int n_atoms, double g1, double g2, double gamma_, double big_gamma_) {
    if (n_atoms % 2 != 0) throw std::invalid_argument("two_set needs even n_atoms");
    cvec g(n_atoms);
    g.head(n_atoms / 2).setConstant(g1);
    g.tail(n_atoms / 2).setConstant(g2);
    return coupling_config(std::move(g), gamma_, big_gamma_);
}

bool coupling_config::is_real() const {
    for (Eigen::Index i = 0; i < g_tilde.size(); ++i)
        if (g_tilde[i].imag() != 0.0) return false;
    return true;
}

namespace {
double set_value(const cvec& g, Eigen::Index lo, Eigen::Index n) {
    std::complex<double> v = g[lo];
    for (Eigen::Index i = lo; i < lo + n; ++i)
        if (std::abs(g[i] - v) > 1e-12) throw std::logic_error("set coupling is not uniform");
    if (v.imag() != 0.0) throw std::logic_error("set coupling is not real");
    return v.real();
}
}  // namespace

double coupling_config::g1() const {
    int n = n_atoms();
    if (n % 2 != 0) throw std::logic_error("set accessors need even n_atoms");
    return set_value(g_tilde, 0, n / 2);
}

double coupling_config::g2() const {
    int n = n_atoms();
    if (n % 2 != 0) throw std::logic_error("set accessors need even n_atoms");
    return set_value(g_tilde, n / 2, n / 2);
}

void apply_j_minus_raw(const cvec& in, const cvec& g, cvec& out) {
    const Eigen::Index dim = in.size();
    out.setZero();
    const int n = static_cast<int>(g.size());
    for (int i = 0; i < n; ++i) {
        const std::complex<double> gi = g[i];
        if (gi == 0.0) continue;
        const Eigen::Index bit = Eigen::Index{1} << i;
        for (Eigen::Index high = 0; high < dim; high += 2 * bit)
            for (Eigen::Index low = 0; low < bit; ++low) {
                const Eigen::Index k = high | bit | low;
                out[k ^ bit] += gi * in[k];
            }
    }
}

void apply_j_plus_raw(const cvec& in, const cvec& g, cvec& out) {
    const Eigen::Index dim = in.size();
    out.setZero();
    const int n = static_cast<int>(g.size());
    for (int i = 0; i < n; ++i) {
        const std::complex<double> gi = std::conj(g[i]);
        if (gi == 0.0) continue;
        const Eigen::Index bit = Eigen::Index{1} << i;
        for (Eigen::Index high = 0; high < dim; high += 2 * bit)
            for (Eigen::Index low = 0; low < bit; ++low) {
                const Eigen::Index k = high | low;  // bit clear
                out[k | bit] += gi * in[k];
            }
    }
}

cvec apply_j_minus(const quantum_state& psi, const coupling_config& c) {
    check_match(psi, c);
    cvec out(psi.dim());
    apply_j_minus_raw(psi.amplitudes(), c.g_tilde, out);
    return out;
}

cvec apply_j_plus(const quantum_state& psi, const coupling_config& c) {
    check_match(psi, c);
    cvec out(psi.dim());
    apply_j_plus_raw(psi.amplitudes(), c.g_tilde, out);
    return out;
}

double expect_jplus_jminus(const quantum_state& psi, const coupling_config& c) {
    check_match(psi, c);
    cvec out(psi.dim());
    apply_j_minus_raw(psi.amplitudes(), c.g_tilde, out);
    return out.squaredNorm();
}

double expect_jz(const quantum_state& psi) {
    const cvec& a = psi.amplitudes();
    const int n = psi.n_atoms();
    double jz = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        double w = std::norm(a[k]);
        if (w == 0.0) continue;
        int pop = 0;
        std::uint64_t bits = static_cast<std::uint64_t>(k);
        while (bits) {
            pop += static_cast<int>(bits & 1u);
            bits >>= 1;
        }
        jz += w * (pop - 0.5 * n);
    }
    return jz;
}

cmat j_minus_matrix(const coupling_config& c) {
    const int n = c.n_atoms();
    if (n > 14) throw std::invalid_argument("dense J- restricted to n_atoms <= 14");
    const Eigen::Index dim = Eigen::Index{1} << n;
    cmat m = cmat::Zero(dim, dim);
    for (int i = 0; i < n; ++i) {
        const Eigen::Index bit = Eigen::Index{1} << i;
        for (Eigen::Index k = 0; k < dim; ++k)
            if (k & bit) m(k ^ bit, k) += c.g_tilde[i];
    }
    return m;
}

}  // namespace demsim
