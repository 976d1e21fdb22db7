#include "demsim/noise.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "demsim/signal.hpp"

namespace demsim {

correlation_matrix::correlation_matrix(dmat m) : c(std::move(m)) {
    if (c.rows() != c.cols() || c.rows() < 2 || c.rows() % 2 != 0)
        throw std::invalid_argument("correlation matrix must be square with even size");
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("correlation matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<dmat> es(c, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("correlation matrix must be positive semidefinite");
}

correlation_matrix make_correlation(correlation_case kind, int n_atoms, double c_var) {
    if (n_atoms < 2 || n_atoms % 2 != 0) throw std::invalid_argument("n_atoms must be even and >= 2");
    if (c_var < 0.0) throw std::invalid_argument("variance must be nonnegative");
    const int half = n_atoms / 2;
    dmat m = dmat::Zero(n_atoms, n_atoms);
    switch (kind) {
        case correlation_case::uncorrelated:
            m.diagonal().setConstant(c_var);
            break;
        case correlation_case::pairwise_identical:
            // fully correlated block replicated across the two sets
            m.setConstant(c_var);
            break;
        case correlation_case::intra_set:
            m.topLeftCorner(half, half).setConstant(c_var);
            m.bottomRightCorner(half, half).setConstant(c_var);
            break;
    }
    return correlation_matrix(std::move(m));
}

correlation_matrix make_correlation_pairwise(const dmat& block) {
    if (block.rows() != block.cols() || block.rows() < 1)
        throw std::invalid_argument("block must be square");
    const int half = static_cast<int>(block.rows());
    dmat m(2 * half, 2 * half);
    m.topLeftCorner(half, half) = block;
    m.topRightCorner(half, half) = block;
    m.bottomLeftCorner(half, half) = block;
    m.bottomRightCorner(half, half) = block;
    return correlation_matrix(std::move(m));
}

bool pairwise_cancellation_holds(const correlation_matrix& c, double g1_ref, double g2_ref, double tol) {
    const int half = c.n_atoms() / 2;
    for (int i = 0; i < half; ++i)
        for (int j = 0; j < half; ++j) {
            double v = c.c(i, j) * g2_ref * g2_ref + c.c(i + half, j + half) * g1_ref * g1_ref -
                       (c.c(i, j + half) + c.c(i + half, j)) * g1_ref * g2_ref;
            if (std::abs(v) > tol) return false;
        }
    return true;
}

double background_alpha(const correlation_matrix& c, const std::vector<std::complex<double>>& b_weights,
                        double gamma) {
    const int half = c.n_atoms() / 2;
    if (static_cast<int>(b_weights.size()) != half)
        throw std::invalid_argument("need one singlet weight per pair");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    double s = 0.0;
    for (int i = 0; i < half; ++i) {
        double m_ii = c.c(i, i) + c.c(i + half, i + half) - c.c(i, i + half) - c.c(i + half, i);
        s += m_ii * std::norm(b_weights[i]);
    }
    return gamma * s;
}

namespace {

std::vector<double> real_pair_column(const pair_amplitudes& p, int slot) {
    std::vector<double> v(static_cast<std::size_t>(p.n_pairs()));
    for (int i = 0; i < p.n_pairs(); ++i) {
        std::complex<double> z = p.coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(slot)];
        if (std::abs(z.imag()) > 1e-12) throw std::invalid_argument("fluctuation formulas need real amplitudes");
        v[static_cast<std::size_t>(i)] = z.real();
    }
    return v;
}

}  // namespace

double fluctuation_k(const correlation_matrix& c, const pair_amplitudes& p) {
    if (!p.singlet_span_only()) throw std::invalid_argument("fluctuation formulas need c = d = 0");
    const int half = c.n_atoms() / 2;
    if (p.n_pairs() != half) throw std::invalid_argument("pair/correlation size mismatch");
    std::vector<double> a = real_pair_column(p, 0);
    std::vector<double> b = real_pair_column(p, 1);

    double ab_total = 0.0;
    for (int i = 0; i < half; ++i) ab_total += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    std::vector<double> s(static_cast<std::size_t>(half));
    for (int i = 0; i < half; ++i) {
        double ab_i = a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
        s[static_cast<std::size_t>(i)] =
            b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)] +
            b[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)] * (ab_total - ab_i);
    }

    double k2 = 0.0;
    for (int i = 0; i < half; ++i)
        for (int j = 0; j < half; ++j) {
            double m_ij = c.c(i, j) + c.c(i + half, j + half) - c.c(i, j + half) - c.c(i + half, j);
            k2 += m_ij * s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)];
        }
    if (k2 < -1e-10) throw std::runtime_error("inconsistent correlation matrix: negative K^2");
    return std::sqrt(std::max(k2, 0.0));
}

double fluctuation_std(const correlation_matrix& c, double delta_g, const pair_amplitudes& p,
                       double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    return 4.0 * gamma * std::abs(delta_g) * fluctuation_k(c, p);
}

std::optional<double> snr_under_noise(double delta_g, int n_atoms, double b, double k) {
    if (k < 0.0) throw std::invalid_argument("K must be nonnegative");
    if (k == 0.0) return std::nullopt;  // noise-free: fall back to shot noise
    return std::abs(delta_g) * f_factor(n_atoms, b) / (4.0 * k);
}

dvec sample_fluctuations(const correlation_matrix& c, counter_rng& rng) {
    Eigen::SelfAdjointEigenSolver<dmat> es(c.c);
    if (es.info() != Eigen::Success) throw std::runtime_error("correlation factorization failed");
    dvec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    dvec z(c.c.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.gaussian();
    return es.eigenvectors() * lam.asDiagonal() * z;
}

correlation_matrix load_correlation_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        for (char& ch : line)
            if (ch == ',' || ch == '\t' || ch == ';') ch = ' ';
        std::istringstream ss(line);
        std::vector<double> row;
        std::string tok;
        bool numeric = true;
        while (ss >> tok) {
            try {
                std::size_t used = 0;
                double v = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                row.push_back(v);
            } catch (...) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {  // header row
                first = false;
                continue;
            }
            throw std::runtime_error("non-numeric row in " + path);
        }
        first = false;
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("no data in " + path);
    const std::size_t n = rows.size();
    dmat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw std::runtime_error("correlation grid is not square in " + path);
        for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return correlation_matrix(std::move(m));
}

}  // namespace demsim
