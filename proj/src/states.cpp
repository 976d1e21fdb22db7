#include "demsim/states.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace demsim {

pair_amplitudes::pair_amplitudes(std::vector<std::array<std::complex<double>, 4>> c) : coeff(std::move(c)) {
    if (coeff.empty()) throw std::invalid_argument("no pairs");
    for (const auto& p : coeff) {
        double n2 = std::norm(p[0]) + std::norm(p[1]) + std::norm(p[2]) + std::norm(p[3]);
        if (std::abs(n2 - 1.0) > 1e-12) throw std::invalid_argument("pair coefficients not normalized");
    }
}

pair_amplitudes pair_amplitudes::uniform(int n_pairs, std::complex<double> a, std::complex<double> b,
                                         std::complex<double> c, std::complex<double> d) {
    if (n_pairs < 1) throw std::invalid_argument("no pairs");
    return pair_amplitudes(std::vector<std::array<std::complex<double>, 4>>(n_pairs, {a, b, c, d}));
}

bool pair_amplitudes::singlet_span_only(double tol) const {
    for (const auto& p : coeff)
        if (std::abs(p[2]) > tol || std::abs(p[3]) > tol) return false;
    return true;
}

namespace {

// per-pair weights indexed by bits (b_low + 2*b_high) of (atom l, atom l+N/2)
using pair_weights = std::array<std::complex<double>, 4>;

quantum_state product_from_weights(const std::vector<pair_weights>& w) {
    const int n_pairs = static_cast<int>(w.size());
    const int n = 2 * n_pairs;
    const Eigen::Index dim = Eigen::Index{1} << n;
    cvec amp(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        std::complex<double> v = 1.0;
        for (int l = 0; l < n_pairs && v != 0.0; ++l) {
            int b_low = static_cast<int>((k >> l) & 1);
            int b_high = static_cast<int>((k >> (l + n_pairs)) & 1);
            v *= w[l][b_low + 2 * b_high];
        }
        amp[k] = v;
    }
    return quantum_state(n, std::move(amp));
}

}  // namespace

quantum_state pair_product_state(const pair_amplitudes& p, const coupling_config& c0) {
    const int n = p.n_atoms();
    if (n != c0.n_atoms()) throw std::invalid_argument("pair/coupling size mismatch");
    if (!p.singlet_span_only()) throw std::invalid_argument("pair_product_state needs c = d = 0");
    const int n_pairs = p.n_pairs();
    std::vector<pair_weights> w(n_pairs);
    for (int l = 0; l < n_pairs; ++l) {
        std::complex<double> gl = c0.g_tilde[l];
        std::complex<double> gh = c0.g_tilde[l + n_pairs];
        double nl = std::sqrt(std::norm(gl) + std::norm(gh));
        if (nl == 0.0) throw std::invalid_argument("generalized singlet undefined: both pair couplings zero");
        // (gl |01> - gh |10>)/nl, low bit = atom l
        w[l][0] = p.coeff[l][0];
        w[l][1] = -p.coeff[l][1] * gh / nl;
        w[l][2] = p.coeff[l][1] * gl / nl;
        w[l][3] = 0.0;
    }
    return product_from_weights(w);
}

quantum_state imperfect_pair_state(std::complex<double> a, std::complex<double> b,
                                   std::complex<double> c, std::complex<double> d, int n_atoms) {
    if (n_atoms < 2 || n_atoms % 2 != 0) throw std::invalid_argument("n_atoms must be even and >= 2");
    double n2 = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    if (std::abs(n2 - 1.0) > 1e-12) throw std::invalid_argument("amplitudes not normalized");
    const double inv_sqrt2 = 0.70710678118654752440;
    pair_weights w;
    w[0] = a;
    w[1] = (-b + c) * inv_sqrt2;
    w[2] = (b + c) * inv_sqrt2;
    w[3] = d;
    return product_from_weights(std::vector<pair_weights>(n_atoms / 2, w));
}

namespace {

bool near_half_int(double x) { return std::abs(2.0 * x - std::round(2.0 * x)) < 1e-9; }

// CG tables for fixed (j1, j2, J): per M a dense (2j1+1)x(2j2+1) grid,
// index (m1+j1)*(2j2+1) + (m2+j2), built by lowering from |J,J>.
struct cg_table {
    std::vector<std::vector<double>> rows;  // rows[J - M]
};

double ladder_up(double j, double m) { return std::sqrt(j * (j + 1.0) - m * (m + 1.0)); }
double ladder_down(double j, double m) { return std::sqrt(j * (j + 1.0) - m * (m - 1.0)); }

cg_table build_cg(double j1, double j2, double big_j) {
    const int d1 = static_cast<int>(2.0 * j1 + 1.5);
    const int d2 = static_cast<int>(2.0 * j2 + 1.5);
    auto at = [&](std::vector<double>& g, double m1, double m2) -> double& {
        return g[static_cast<int>(m1 + j1 + 0.5) * d2 + static_cast<int>(m2 + j2 + 0.5)];
    };
    cg_table t;
    const int n_m = static_cast<int>(2.0 * big_j + 1.5);
    t.rows.assign(n_m, std::vector<double>(d1 * d2, 0.0));

    // top row M = J from the J+ null condition, then Condon-Shortley sign
    double lo = std::max(-j1, big_j - j2);
    double hi = std::min(j1, big_j + j2);
    std::vector<double> e;
    e.push_back(1.0);
    for (double m1 = lo + 1.0; m1 <= hi + 0.5; m1 += 1.0)
        e.push_back(-e.back() * ladder_up(j1, m1 - 1.0) / ladder_up(j2, big_j - m1));
    double s = 0.0;
    for (double v : e) s += v * v;
    double scale = 1.0 / std::sqrt(s);
    if (e.back() < 0.0) scale = -scale;  // coefficient at m1 = j1 positive
    for (std::size_t i = 0; i < e.size(); ++i) at(t.rows[0], lo + static_cast<double>(i), big_j - lo - static_cast<double>(i)) = e[i] * scale;

    for (int r = 1; r < n_m; ++r) {
        double m = big_j - r;  // building row for M = m from M = m+1
        double denom = ladder_down(big_j, m + 1.0);
        for (double m1 = -j1; m1 <= j1 + 0.5; m1 += 1.0) {
            double m2 = m - m1;
            if (m2 < -j2 - 0.5 || m2 > j2 + 0.5) continue;
            double v = 0.0;
            if (m1 + 1.0 <= j1 + 0.5) v += at(t.rows[r - 1], m1 + 1.0, m2) * ladder_down(j1, m1 + 1.0);
            if (m2 + 1.0 <= j2 + 0.5) v += at(t.rows[r - 1], m1, m2 + 1.0) * ladder_down(j2, m2 + 1.0);
            at(t.rows[r], m1, m2) = v / denom;
        }
    }
    return t;
}

const cg_table& cached_cg(double j1, double j2, double big_j) {
    static std::map<std::tuple<int, int, int>, cg_table> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(static_cast<int>(2.0 * j1 + 0.5), static_cast<int>(2.0 * j2 + 0.5),
                               static_cast<int>(2.0 * big_j + 0.5));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_cg(j1, j2, big_j)).first;
    return it->second;
}

}  // namespace

double clebsch_gordan(double j1, double m1, double j2, double m2, double big_j, double big_m) {
    if (!near_half_int(j1) || !near_half_int(m1) || !near_half_int(j2) || !near_half_int(m2) ||
        !near_half_int(big_j) || !near_half_int(big_m))
        return 0.0;
    if (j1 < 0.0 || j2 < 0.0 || big_j < 0.0) return 0.0;
    auto integral = [](double a, double b) { return std::abs(a - b - std::round(a - b)) < 1e-9; };
    if (!integral(j1, m1) || !integral(j2, m2) || !integral(big_j, big_m)) return 0.0;
    if (std::abs(m1) > j1 + 1e-9 || std::abs(m2) > j2 + 1e-9 || std::abs(big_m) > big_j + 1e-9) return 0.0;
    if (std::abs(m1 + m2 - big_m) > 1e-9) return 0.0;
    if (big_j < std::abs(j1 - j2) - 1e-9 || big_j > j1 + j2 + 1e-9) return 0.0;
    if (!integral(j1 + j2, big_j)) return 0.0;

    const cg_table& t = cached_cg(j1, j2, big_j);
    int r = static_cast<int>(big_j - big_m + 0.5);
    int d2 = static_cast<int>(2.0 * j2 + 1.5);
    int i1 = static_cast<int>(m1 + j1 + 0.5);
    int i2 = static_cast<int>(m2 + j2 + 0.5);
    return t.rows[r][i1 * d2 + i2];
}

cat_state_spec::cat_state_spec(double ell_, int j_) : ell(ell_), j(j_) {
    if (ell < 0.0 || !near_half_int(ell)) throw std::invalid_argument("ell must be a nonnegative half-integer");
    if (j < 0 || static_cast<double>(j) > 2.0 * ell + 1e-9) throw std::invalid_argument("need 0 <= j <= 2 ell");
}

Eigen::Index cat_state_spec::index(double m1, double m2) const {
    int d = per_set_dim();
    int i1 = static_cast<int>(std::round(m1 + ell));
    int i2 = static_cast<int>(std::round(m2 + ell));
    if (i1 < 0 || i1 >= d || i2 < 0 || i2 >= d) throw std::out_of_range("m out of range");
    return Eigen::Index{i1} * d + i2;
}

dvec cat_state(const cat_state_spec& spec) {
    dvec amp = dvec::Zero(spec.dim());
    const double target_m = -static_cast<double>(spec.j);
    for (double m1 = -spec.ell; m1 <= spec.ell + 0.5; m1 += 1.0) {
        double m2 = target_m - m1;
        if (m2 < -spec.ell - 0.5 || m2 > spec.ell + 0.5) continue;
        amp[spec.index(m1, m2)] = clebsch_gordan(spec.ell, m1, spec.ell, m2, spec.j, target_m);
    }
    return amp;
}

double cat_expect_j1pj1m(const cat_state_spec& spec, double g1) {
    double j = spec.j;
    double num = (2.0 * j + 1.0) * (2.0 * j + 2.0);
    double den = 4.0 * (j + 1.0) * (j + 1.0) - 1.0;
    return g1 * g1 * (num / den) * (spec.ell * (spec.ell + 1.0) - j * (j + 2.0) / 4.0);
}

double cat_expect_j1pj1m_brute(const cat_state_spec& spec, double g1) {
    dvec amp = cat_state(spec);
    double tot = 0.0;
    for (double m1 = -spec.ell; m1 <= spec.ell + 0.5; m1 += 1.0)
        for (double m2 = -spec.ell; m2 <= spec.ell + 0.5; m2 += 1.0) {
            double a = amp[spec.index(m1, m2)];
            if (a == 0.0) continue;
            // J1- shifts m1 down injectively, so ||J1- psi||^2 sums termwise
            tot += a * a * (spec.ell * (spec.ell + 1.0) - m1 * (m1 - 1.0));
        }
    return g1 * g1 * tot;
}

std::vector<quantum_state> dfs_basis(int n_atoms, const coupling_config& c0) {
    if (n_atoms < 1 || n_atoms > 14) throw std::invalid_argument("dfs_basis restricted to n_atoms <= 14");
    if (n_atoms != c0.n_atoms()) throw std::invalid_argument("coupling size mismatch");
    const Eigen::Index dim = Eigen::Index{1} << n_atoms;

    std::vector<std::vector<Eigen::Index>> sector(n_atoms + 1);
    for (Eigen::Index k = 0; k < dim; ++k) {
        int pop = 0;
        for (std::uint64_t b = static_cast<std::uint64_t>(k); b; b >>= 1) pop += static_cast<int>(b & 1u);
        sector[pop].push_back(k);
    }

    std::vector<quantum_state> out;
    {
        cvec ground = cvec::Zero(dim);
        ground[0] = 1.0;
        out.emplace_back(n_atoms, std::move(ground));
    }

    for (int exc = 1; exc <= n_atoms; ++exc) {
        const auto& from = sector[exc];
        const auto& to = sector[exc - 1];
        std::map<Eigen::Index, Eigen::Index> to_pos;
        for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(to.size()); ++r) to_pos[to[r]] = r;

        cmat m = cmat::Zero(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()));
        for (Eigen::Index col = 0; col < m.cols(); ++col) {
            Eigen::Index k = from[static_cast<std::size_t>(col)];
            for (int i = 0; i < n_atoms; ++i) {
                Eigen::Index bit = Eigen::Index{1} << i;
                if (k & bit) m(to_pos[k ^ bit], col) += c0.g_tilde[i];
            }
        }

        Eigen::BDCSVD<cmat> svd(m, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        double smax = sv.size() > 0 ? sv[0] : 0.0;
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv[i] > 1e-10 * smax) ++rank;
        for (Eigen::Index col = rank; col < m.cols(); ++col) {
            cvec full = cvec::Zero(dim);
            for (Eigen::Index r = 0; r < m.cols(); ++r) full[from[static_cast<std::size_t>(r)]] = svd.matrixV()(r, col);
            out.emplace_back(n_atoms, std::move(full));
        }
    }
    return out;
}

quantum_state random_dfs_state(const std::vector<quantum_state>& basis, counter_rng& rng) {
    if (basis.empty()) throw std::invalid_argument("empty dark basis");
    cvec amp = cvec::Zero(basis.front().dim());
    for (const auto& e : basis) {
        std::complex<double> z(rng.gaussian(), rng.gaussian());
        amp += z * e.amplitudes();
    }
    return quantum_state(basis.front().n_atoms(), std::move(amp));
}

quantum_state random_dfs_state(int n_atoms, const coupling_config& c0, std::uint64_t seed) {
    auto basis = dfs_basis(n_atoms, c0);
    counter_rng rng(seed, 0);
    return random_dfs_state(basis, rng);
}

}  // namespace demsim
