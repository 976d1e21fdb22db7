#include "demsim/sse.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace demsim {

namespace {

void require_real(const coupling_config& c) {
    if (!c.is_real()) throw std::invalid_argument("sse requires real couplings");
}

dvec real_couplings(const coupling_config& c) {
    require_real(c);
    return c.g_tilde.real();
}

// J- with real weights; out must be sized. Kept local: the SSE loop is the
// only real-coupling hot path.
void apply_jm_real(const cvec& in, const dvec& g, cvec& out) {
    const Eigen::Index dim = in.size();
    out.setZero();
    for (int i = 0; i < g.size(); ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        const Eigen::Index bit = Eigen::Index{1} << i;
        for (Eigen::Index high = 0; high < dim; high += 2 * bit)
            for (Eigen::Index low = 0; low < bit; ++low) {
                const Eigen::Index k = high | bit | low;
                out[k ^ bit] += gi * in[k];
            }
    }
}

void apply_jp_real(const cvec& in, const dvec& g, cvec& out) {
    const Eigen::Index dim = in.size();
    out.setZero();
    for (int i = 0; i < g.size(); ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        const Eigen::Index bit = Eigen::Index{1} << i;
        for (Eigen::Index high = 0; high < dim; high += 2 * bit)
            for (Eigen::Index low = 0; low < bit; ++low) {
                const Eigen::Index k = high | low;
                out[k | bit] += gi * in[k];
            }
    }
}

struct sse_work {
    dvec g;
    double gamma;
    double dt;       // physical step
    cvec jm, jpjm, next;

    explicit sse_work(const coupling_config& c, double dt_gamma, Eigen::Index dim)
        : g(real_couplings(c)), gamma(c.gamma), dt(dt_gamma / c.gamma), jm(dim), jpjm(dim), next(dim) {}

    // advances psi in place; returns ||psi' - psi||
    double step(cvec& psi, double dw) {
        apply_jm_real(psi, g, jm);
        std::complex<double> ev = psi.dot(jm);  // <J->
        apply_jp_real(jm, g, jpjm);             // J+ J- psi

        const std::complex<double> c1 = gamma * 2.0 * ev;
        const std::complex<double> c2 = gamma * ev * ev;
        const double s2g = std::sqrt(2.0 * gamma);

        next = psi + dt * (c1 * jm - gamma * jpjm - c2 * psi) + dw * (s2g * (jm - ev * psi));
        double nrm = next.norm();
        if (!(nrm > 0.0) || !std::isfinite(nrm)) throw std::runtime_error("sse step produced a non-finite state");
        next /= nrm;
        double diff = (next - psi).norm();
        psi.swap(next);
        return diff;
    }
};

}  // namespace

quantum_state sse_step(const quantum_state& psi, const coupling_config& c0, double dt, double dw) {
    if (psi.n_atoms() != c0.n_atoms()) throw std::invalid_argument("state/coupling size mismatch");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    sse_work w(c0, dt * c0.gamma, psi.dim());  // dt here is the physical step
    cvec amp = psi.amplitudes();
    w.step(amp, dw);
    return quantum_state(psi.n_atoms(), std::move(amp));
}

namespace {

cvec relax_raw(cvec psi, const coupling_config& c0, const sse_config& cfg, counter_rng& rng) {
    sse_work w(c0, cfg.dt, psi.size());
    const double sqrt_dt = std::sqrt(w.dt);
    for (long n = 0; n < cfg.max_steps; ++n) {
        double dw = sqrt_dt * rng.gaussian();
        if (w.step(psi, dw) < cfg.convergence_tol) return psi;
    }
    throw std::runtime_error("relaxation did not converge within " + std::to_string(cfg.max_steps) + " steps");
}

}  // namespace

quantum_state relax_to_dark(const quantum_state& psi0, const coupling_config& c0,
                            const sse_config& cfg, counter_rng& rng) {
    if (psi0.n_atoms() != c0.n_atoms()) throw std::invalid_argument("state/coupling size mismatch");
    if (!(cfg.dt > 0.0) || !(cfg.convergence_tol > 0.0)) throw std::invalid_argument("bad sse config");
    return quantum_state(psi0.n_atoms(), relax_raw(psi0.amplitudes(), c0, cfg, rng));
}

int default_workers() {
    if (const char* env = std::getenv("DEMSIM_WORKERS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

long reference_n_realizations(int n_atoms) {
    switch (n_atoms) {
        case 2: return 100000;
        case 4: return 10000;
        case 6: return 10000;
        case 8: return 2500;
        case 10: return 1000;
        case 12: return 1250;
        case 14: return 250;
        case 16: return 200;
        case 18: return 250;
        default: throw std::invalid_argument("no realization preset for this n_atoms");
    }
}

ensemble_result ensemble_alpha(const quantum_state& psi0, const coupling_config& c0_relax,
                               const coupling_config& c_perturbed, const sse_config& cfg) {
    if (psi0.n_atoms() != c0_relax.n_atoms() || psi0.n_atoms() != c_perturbed.n_atoms())
        throw std::invalid_argument("state/coupling size mismatch");
    if (cfg.n_realizations < 1) throw std::invalid_argument("need at least one realization");
    require_real(c0_relax);

    const long n = cfg.n_realizations;
    std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
    std::vector<unsigned char> dark_warn(static_cast<std::size_t>(n), 0);

    const dvec g_relax = real_couplings(c0_relax);
    const cvec psi_init = psi0.amplitudes();

    std::atomic<long> cursor{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mu;

    auto worker = [&]() {
        cvec jm_pert(psi_init.size());
        for (;;) {
            long r = cursor.fetch_add(1);
            if (r >= n || failed.load()) break;
            try {
                counter_rng rng(cfg.seed, static_cast<std::uint64_t>(r));
                cvec psi = relax_raw(psi_init, c0_relax, cfg, rng);
                apply_jm_real(psi, g_relax, jm_pert);
                if (jm_pert.norm() > 1e-6) dark_warn[static_cast<std::size_t>(r)] = 1;
                apply_j_minus_raw(psi, c_perturbed.g_tilde, jm_pert);
                alpha[static_cast<std::size_t>(r)] = 2.0 * c_perturbed.gamma * jm_pert.squaredNorm();
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mu);
                error_message = e.what();
                failed.store(true);
                break;
            }
        }
    };

    int n_workers = static_cast<int>(std::min<long>(default_workers(), n));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error("ensemble realization failed: " + error_message);

    // compensated mean and variance, index order, worker-count independent
    double sum = 0.0, comp = 0.0;
    for (double v : alpha) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double mean = sum / static_cast<double>(n);
    double ss = 0.0, comp2 = 0.0;
    for (double v : alpha) {
        double d = (v - mean) * (v - mean) - comp2;
        double t = ss + d;
        comp2 = (t - ss) - d;
        ss = t;
    }

    ensemble_result out;
    out.mean_alpha = mean;
    out.std_error = n > 1 ? std::sqrt(ss / (static_cast<double>(n) - 1.0) / static_cast<double>(n)) : 0.0;
    out.n_realizations = n;
    out.seed = cfg.seed;
    for (unsigned char w : dark_warn) out.dark_residual_warnings += w;
    if (cfg.keep_realizations) out.per_realization = std::move(alpha);
    return out;
}

}  // namespace demsim
