#include "demsim/runner.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "demsim/cavity.hpp"
#include "demsim/liouville.hpp"
#include "demsim/noise.hpp"
#include "demsim/signal.hpp"
#include "demsim/sse.hpp"
#include "demsim/states.hpp"

namespace demsim {

namespace {

fit_result linear_least_squares(const dmat& x, const dvec& y, std::string model) {
    Eigen::ColPivHouseholderQR<dmat> qr(x);
    if (qr.rank() < x.cols()) throw std::invalid_argument("rank-deficient fit design");
    dvec beta = qr.solve(y);
    dvec resid = y - x * beta;
    double dof = static_cast<double>(x.rows() - x.cols());
    double s2 = dof > 0.0 ? resid.squaredNorm() / dof : 0.0;
    dmat cov = s2 * (x.transpose() * x).inverse();

    fit_result out;
    out.model = std::move(model);
    out.coeff.assign(beta.data(), beta.data() + beta.size());
    out.std_err.resize(static_cast<std::size_t>(beta.size()));
    for (Eigen::Index i = 0; i < beta.size(); ++i)
        out.std_err[static_cast<std::size_t>(i)] = std::sqrt(std::max(cov(i, i), 0.0));
    out.residual_norm = resid.norm();
    return out;
}

}  // namespace

fit_result fit_fourier(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit input lengths differ");
    if (x.size() < 3) throw std::invalid_argument("fourier fit needs at least 3 points");
    dmat design(static_cast<Eigen::Index>(x.size()), 3);
    dvec rhs(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        design(static_cast<Eigen::Index>(i), 0) = 1.0;
        design(static_cast<Eigen::Index>(i), 1) = std::sin(2.0 * x[i]);
        design(static_cast<Eigen::Index>(i), 2) = std::cos(4.0 * x[i]);
        rhs[static_cast<Eigen::Index>(i)] = y[i];
    }
    return linear_least_squares(design, rhs, "fourier");
}

fit_result fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit input lengths differ");
    if (x.size() < 2) throw std::invalid_argument("power-law fit needs at least 2 points");
    dmat design(static_cast<Eigen::Index>(x.size()), 2);
    dvec rhs(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("power-law fit needs positive data");
        design(static_cast<Eigen::Index>(i), 0) = 1.0;
        design(static_cast<Eigen::Index>(i), 1) = std::log(x[i]);
        rhs[static_cast<Eigen::Index>(i)] = std::log(y[i]);
    }
    fit_result f = linear_least_squares(design, rhs, "powerlaw");
    double a = std::exp(f.coeff[0]);
    f.std_err[0] *= a;  // delta method for the amplitude
    f.coeff[0] = a;
    return f;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void csv_writer::metadata(const std::string& key, const std::string& value) {
    os_ << "# " << key << "=" << value << "\n";
}

void csv_writer::metadata(const std::string& key, double value) { metadata(key, format_double(value)); }

void csv_writer::header(const std::vector<std::string>& columns) {
    n_columns_ = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << "\n";
}

void csv_writer::row(const std::vector<double>& values) {
    if (values.size() != n_columns_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_double(values[i]);
    os_ << "\n";
}

std::vector<double> csv_table::column(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c] == name) {
            std::vector<double> out;
            out.reserve(rows.size());
            for (const auto& r : rows) out.push_back(r[c]);
            return out;
        }
    throw std::invalid_argument("no column named '" + name + "'");
}

csv_table read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    csv_table t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (t.columns.empty()) {
            t.columns = std::move(cells);
            continue;
        }
        if (cells.size() != t.columns.size()) throw std::runtime_error("ragged csv row in " + path);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(std::stod(c));
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty()) throw std::runtime_error("no header in " + path);
    return t;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    if (text.find(':') != std::string::npos) {
        int a = 0, b = 0, s = 1;
        char c1 = 0, c2 = 0;
        std::istringstream ss(text);
        if (!(ss >> a >> c1 >> b) || c1 != ':') throw std::invalid_argument("bad range '" + text + "'");
        if (ss >> c2 >> s) {
            if (c2 != ':') throw std::invalid_argument("bad range '" + text + "'");
        }
        if (s < 1 || b < a) throw std::invalid_argument("bad range '" + text + "'");
        for (int v = a; v <= b; v += s) out.push_back(v);
        return out;
    }
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty list '" + text + "'");
    return out;
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct global_options {
    double gamma = 1.0;
    double big_gamma = 0.0;
    double delta_t = 1.0;
    double g1 = 1.05;
    double g2 = 0.95;
    std::uint64_t seed = 0;
    bool paper_units = false;
    bool deterministic = false;
    std::string out;
    // geometry (config-file friendly names)
    double geo_l = 1.0;
    int geo_n_x = 4;
    double geo_x1_over_l = 0.0625;
    int geo_m = 1;
    double geo_g0 = 1.0;
};

struct output_sink {
    std::ofstream file;
    std::ostream* os = nullptr;

    explicit output_sink(const std::string& path) {
        if (path.empty()) {
            os = &std::cout;
        } else {
            file.open(path);
            if (!file) throw std::runtime_error("cannot write " + path);
            os = &file;
        }
    }
};

void common_metadata(csv_writer& w, const global_options& g, const std::string& command) {
    w.metadata("version", demsim_version);
    w.metadata("command", command);
    if (!g.deterministic) {
        char buf[64];
        std::time_t now = std::time(nullptr);
        std::tm tm_utc{};
        gmtime_r(&now, &tm_utc);
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        w.metadata("generated", buf);
    }
    w.metadata("units", g.paper_units ? "gamma_dG2" : "bare");
}

double unit_scale(const global_options& g) {
    if (!g.paper_units) return 1.0;
    double d = g.g1 - g.g2;
    if (d == 0.0) throw std::runtime_error("--paper-units needs g1 != g2");
    return 1.0 / (g.gamma * d * d);
}

// ---- subcommand bodies ----

struct alpha_params {
    int n = 4;
    double a = kInvSqrt2, b = kInvSqrt2, c = 0.0, d = 0.0;
};

void run_alpha(const global_options& g, const alpha_params& p) {
    imperfect_count r = n_ph_imperfect(p.a, p.b, p.c, p.d, p.n, g.g1, g.g2, g.gamma, g.delta_t);
    signal_result sig = make_signal_result(r.alpha_brute, g.delta_t);
    double spont = alpha_spontaneous(std::vector<std::complex<double>>(p.n / 2, p.b), g.big_gamma);
    double u = unit_scale(g);

    output_sink sink(g.out);
    csv_writer w(*sink.os);
    common_metadata(w, g, "alpha");
    w.metadata("n", p.n);
    w.metadata("a", p.a);
    w.metadata("b", p.b);
    w.metadata("c", p.c);
    w.metadata("d", p.d);
    w.metadata("g1", g.g1);
    w.metadata("g2", g.g2);
    w.metadata("gamma", g.gamma);
    w.metadata("big_gamma", g.big_gamma);
    w.metadata("delta_t", g.delta_t);
    w.header({"alpha", "n_ph", "snr", "outside_window", "alpha_form_2d2", "alpha_form_d2",
              "alpha_spontaneous"});
    w.row({r.alpha_brute * u, r.n_ph, sig.snr, sig.outside_validity_window ? 1.0 : 0.0,
           r.alpha_form_2d2 * u, r.alpha_form_d2 * u, spont});
}

struct sweep_params {
    int n = 4;
    int grid = 9;
};

void run_sweep_delta(const global_options& g, const sweep_params& p) {
    coupling_config relax = coupling_config::uniform(p.n, 1.0, g.gamma);
    coupling_config pert = coupling_config::two_set(p.n, g.g1, g.g2, g.gamma);
    double u = unit_scale(g);

    output_sink sink(g.out);
    csv_writer w(*sink.os);
    common_metadata(w, g, "sweep-delta");
    w.metadata("n", p.n);
    w.metadata("delta_grid", p.grid);
    w.metadata("g1", g.g1);
    w.metadata("g2", g.g2);
    w.metadata("gamma", g.gamma);
    w.header({"delta", "alpha"});
    for (int k = 0; k < p.grid; ++k) {
        double delta = p.grid == 1 ? 0.0 : 0.5 * M_PI * k / (p.grid - 1);
        w.row({delta, exact_relaxed_alpha(p.n, delta, relax, pert) * u});
    }
}

std::vector<double> delta_grid_points(int grid) {
    std::vector<double> out;
    for (int k = 0; k < grid; ++k) out.push_back(grid == 1 ? 0.0 : 0.5 * M_PI * k / (grid - 1));
    return out;
}

struct sse_params {
    int n = 4;
    int grid = 9;
    std::vector<double> deltas;  // overrides grid when nonempty
    long nr = 0;                 // 0: preset
    double dt = 0.01;
    double tol = 1e-12;
};

void run_sse(const global_options& g, const sse_params& p) {
    std::vector<double> deltas = p.deltas.empty() ? delta_grid_points(p.grid) : p.deltas;
    long nr = p.nr > 0 ? p.nr : reference_n_realizations(p.n);
    coupling_config relax = coupling_config::uniform(p.n, 1.0, g.gamma);
    coupling_config pert = coupling_config::two_set(p.n, g.g1, g.g2, g.gamma);
    double u = unit_scale(g);

    output_sink sink(g.out);
    csv_writer w(*sink.os);
    common_metadata(w, g, "sse");
    w.metadata("n", p.n);
    w.metadata("n_realizations", static_cast<double>(nr));
    w.metadata("seed", static_cast<double>(g.seed));
    w.metadata("dt", p.dt);
    w.metadata("tol", p.tol);
    w.metadata("renormalized", 1.0);
    w.metadata("g1", g.g1);
    w.metadata("g2", g.g2);
    w.metadata("gamma", g.gamma);
    w.header({"delta", "alpha_mean", "alpha_stderr", "n_realizations"});
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        double delta = deltas[i];
        quantum_state psi0 = imperfect_pair_state(std::cos(delta) * kInvSqrt2, kInvSqrt2, 0.0,
                                                  std::sin(delta) * kInvSqrt2, p.n);
        sse_config cfg;
        cfg.dt = p.dt;
        cfg.convergence_tol = p.tol;
        cfg.seed = g.seed + 1000003ull * i;
        cfg.n_realizations = nr;
        ensemble_result r = ensemble_alpha(psi0, relax, pert, cfg);
        w.row({delta, r.mean_alpha * u, r.std_error * u, static_cast<double>(r.n_realizations)});
    }
}

struct scaling_params {
    std::string states = "ideal";
    std::string n_list = "2:18:2";
    double delta = 0.0;
    double b = kInvSqrt2;
    long nr = 0;
    long samples = 200;
};

void run_scaling(const global_options& g, const scaling_params& p) {
    std::vector<int> ns = parse_int_list(p.n_list);
    double dg = 0.5 * (g.g1 - g.g2);
    double u = unit_scale(g);

    output_sink sink(g.out);
    csv_writer w(*sink.os);
    common_metadata(w, g, "scaling");
    w.metadata("states", p.states);
    w.metadata("delta", p.delta);
    w.metadata("b", p.b);
    w.metadata("g1", g.g1);
    w.metadata("g2", g.g2);
    w.metadata("gamma", g.gamma);
    w.metadata("seed", static_cast<double>(g.seed));

    if (p.states == "ideal") {
        w.header({"n", "alpha"});
        for (int n : ns) w.row({static_cast<double>(n), g.gamma * dg * dg * f_factor(n, p.b) * u});
    } else if (p.states == "relaxed") {
        w.header({"n", "alpha", "alpha_stderr", "n_realizations"});
        for (int n : ns) {
            coupling_config relax = coupling_config::uniform(n, 1.0, g.gamma);
            coupling_config pert = coupling_config::two_set(n, g.g1, g.g2, g.gamma);
            if (p.delta == 0.0) {
                w.row({static_cast<double>(n), g.gamma * dg * dg * f_factor(n, p.b) * u, 0.0, 0.0});
            } else if (n <= 6) {
                w.row({static_cast<double>(n), exact_relaxed_alpha(n, p.delta, relax, pert) * u, 0.0, 0.0});
            } else {
                quantum_state psi0 = imperfect_pair_state(std::cos(p.delta) * kInvSqrt2, kInvSqrt2, 0.0,
                                                          std::sin(p.delta) * kInvSqrt2, n);
                sse_config cfg;
                cfg.seed = g.seed + 7919ull * static_cast<std::uint64_t>(n);
                cfg.n_realizations = p.nr > 0 ? p.nr : reference_n_realizations(n);
                ensemble_result r = ensemble_alpha(psi0, relax, pert, cfg);
                w.row({static_cast<double>(n), r.mean_alpha * u, r.std_error * u,
                       static_cast<double>(r.n_realizations)});
            }
        }
    } else if (p.states == "random-dfs") {
        w.header({"n", "alpha_mean", "alpha_stderr", "n_samples"});
        for (int n : ns) {
            coupling_config relax = coupling_config::uniform(n, 1.0, g.gamma);
            coupling_config pert = coupling_config::two_set(n, g.g1, g.g2, g.gamma);
            auto basis = dfs_basis(n, relax);
            counter_rng rng(g.seed, static_cast<std::uint64_t>(n));
            double sum = 0.0, sum2 = 0.0;
            for (long s = 0; s < p.samples; ++s) {
                quantum_state psi = random_dfs_state(basis, rng);
                double a = alpha_collective(psi, pert) * u;
                sum += a;
                sum2 += a * a;
            }
            double mean = sum / static_cast<double>(p.samples);
            double var = p.samples > 1
                             ? (sum2 - static_cast<double>(p.samples) * mean * mean) /
                                   (static_cast<double>(p.samples) - 1.0)
                             : 0.0;
            w.row({static_cast<double>(n), mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(p.samples)),
                   static_cast<double>(p.samples)});
        }
    } else if (p.states == "cat") {
        w.header({"n", "n_ph"});
        for (int n : ns) w.row({static_cast<double>(n), n_ph_cat(n, dg, g.gamma, g.delta_t)});
    } else {
        throw std::invalid_argument("unknown --states '" + p.states + "'");
    }
}

struct cat_params {
    std::string n_list = "4:16:4";
};

void run_cat(const global_options& g, const cat_params& p) {
    double dg = 0.5 * (g.g1 - g.g2);
    output_sink sink(g.out);
    csv_writer w(*sink.os);
    common_metadata(w, g, "cat");
    w.metadata("dg", dg);
    w.metadata("gamma", g.gamma);
    w.metadata("delta_t", g.delta_t);
    w.header({"n", "n_ph", "n_ph_brute"});
    for (int n : parse_int_list(p.n_list)) {
        double closed = n_ph_cat(n, dg, g.gamma, g.delta_t);
        cat_state_spec spec(0.25 * n, 0);
        double brute = 2.0 * g.gamma * g.delta_t * 4.0 * dg * dg * cat_expect_j1pj1m_brute(spec, 1.0);
        w.row({static_cast<double>(n), closed, brute});
    }
}

struct random_dfs_params {
    std::string n_list = "4:12:2";
    long samples = 200;
};

void run_random_dfs(const global_options& g, const random_dfs_params& p) {
    scaling_params sp;
    sp.states = "random-dfs";
    sp.n_list = p.n_list;
    sp.samples = p.samples;
    run_scaling(g, sp);
}

struct noise_params {
    int noise_case = 1;
    std::string corr_file;
    std::string n_list = "8:32:8";
    double c_var = 1.0;
    double a = kInvSqrt2, b = kInvSqrt2;
};

void run_noise(const global_options& g, const noise_params& p) {
    double dg = 0.5 * (g.g1 - g.g2);
    output_sink sink(g.out);
    csv_writer w(*sink.os);
    common_metadata(w, g, "noise");
    w.metadata("dg", dg);
    w.metadata("gamma", g.gamma);

    auto emit = [&](const correlation_matrix& c) {
        int n = c.n_atoms();
        pair_amplitudes pa = pair_amplitudes::uniform(n / 2, p.a, p.b);
        std::vector<std::complex<double>> bw(static_cast<std::size_t>(n / 2), p.b);
        double bg = background_alpha(c, bw, g.gamma);
        double k = fluctuation_k(c, pa);
        double fs = 4.0 * g.gamma * std::abs(dg) * k;
        std::optional<double> snr = snr_under_noise(dg, n, std::abs(p.b), k);
        w.row({static_cast<double>(n), bg, k, fs, snr ? *snr : std::numeric_limits<double>::infinity(),
               snr ? 0.0 : 1.0});
    };

    if (!p.corr_file.empty()) {
        w.metadata("corr_file", p.corr_file);
        w.header({"n", "background", "k", "fluct_std", "snr", "noise_free"});
        emit(load_correlation_csv(p.corr_file));
        return;
    }
    w.metadata("case", static_cast<double>(p.noise_case));
    w.metadata("c_var", p.c_var);
    w.header({"n", "background", "k", "fluct_std", "snr", "noise_free"});
    correlation_case kind;
    switch (p.noise_case) {
        case 1: kind = correlation_case::uncorrelated; break;
        case 2: kind = correlation_case::pairwise_identical; break;
        case 3: kind = correlation_case::intra_set; break;
        default: throw std::invalid_argument("--case must be 1, 2 or 3");
    }
    for (int n : parse_int_list(p.n_list)) emit(make_correlation(kind, n, p.c_var));
}

struct calibrate_params {
    int n = 64;
    double gamma_dt = 25.0;
    double tol = 0.0;         // 0: L / n
    double bracket_lo = 0.0;  // 0: derived from the mode lobe
    double bracket_hi = 0.0;
    long trials = 100;
    bool noisy = false;
    long total_pairs = 0;      // 0: 8 n
    long reserve = 0;          // 0: n / 2
    long pairs_per_probe = 0;  // 0: ceil(N / (2 ln N))
    double b = kInvSqrt2;
};

void run_calibrate(const global_options& g, const calibrate_params& p) {
    cavity_geometry geo(g.geo_l, g.geo_n_x, g.geo_x1_over_l * g.geo_l, g.geo_m, g.geo_g0);
    double x_star = geo.x2();
    double spacing = geo.length / geo.n_x;
    double lo = p.bracket_lo, hi = p.bracket_hi;
    if (lo == 0.0 && hi == 0.0) {
        double lobe_lo = std::floor(x_star / spacing) * spacing;
        lo = lobe_lo + 0.05 * spacing;
        hi = lobe_lo + 0.95 * spacing;
    }
    double tol = p.tol > 0.0 ? p.tol : geo.length / p.n;
    long ppp = p.pairs_per_probe > 0 ? p.pairs_per_probe : default_pairs_per_probe(p.n);
    int n_sub = static_cast<int>(2 * ppp);
    probe_model pm = make_probe_model(geo, x_star, n_sub, p.b, p.gamma_dt, lo, hi);

    output_sink sink(g.out);
    csv_writer w(*sink.os);
    common_metadata(w, g, "calibrate");
    w.metadata("n", p.n);
    w.metadata("x_star", x_star);
    w.metadata("bracket_lo", lo);
    w.metadata("bracket_hi", hi);
    w.metadata("tol", tol);
    w.metadata("gamma_dt", p.gamma_dt);
    w.metadata("pairs_per_probe", static_cast<double>(ppp));
    w.metadata("n_sub", n_sub);
    w.metadata("f_sub", pm.f_sub);
    w.metadata("kappa", pm.kappa);
    w.metadata("noisy", p.noisy ? 1.0 : 0.0);
    w.metadata("seed", static_cast<double>(g.seed));
    w.header({"trial", "x_hat", "probes_used", "abs_error", "success"});

    long successes = 0;
    double probe_sum = 0.0;
    for (long t = 0; t < p.trials; ++t) {
        calibration_budget budget;
        budget.total_pairs = p.total_pairs > 0 ? p.total_pairs : 8l * p.n;
        budget.reserve = p.reserve > 0 ? p.reserve : p.n / 2;
        budget.pairs_per_probe = ppp;
        counter_rng rng(g.seed, static_cast<std::uint64_t>(t));
        auto measure = [&](double x) {
            double mean = pm.mean(x);
            return p.noisy ? static_cast<double>(rng.poisson(mean)) : mean;
        };
        calibration_result r = calibrate_golden_section(measure, lo, hi, tol, budget);
        double err = std::abs(r.x_hat - x_star);
        bool ok = err <= 2.0 * tol;
        successes += ok ? 1 : 0;
        probe_sum += static_cast<double>(r.probes_used);
        w.row({static_cast<double>(t), r.x_hat, static_cast<double>(r.probes_used), err, ok ? 1.0 : 0.0});
    }
    w.metadata("success_rate", static_cast<double>(successes) / static_cast<double>(p.trials));
    w.metadata("mean_probes", probe_sum / static_cast<double>(p.trials));
}

struct fit_params {
    std::string model = "fourier";
    std::string in;
    std::string xcol;
    std::string ycol;
};

void run_fit(const global_options& g, const fit_params& p) {
    csv_table t = read_csv(p.in);
    if (t.columns.size() < 2) throw std::runtime_error("fit input needs at least two columns");
    std::vector<double> x = t.column(p.xcol.empty() ? t.columns[0] : p.xcol);
    std::vector<double> y = t.column(p.ycol.empty() ? t.columns[1] : p.ycol);

    fit_result f;
    if (p.model == "fourier")
        f = fit_fourier(x, y);
    else if (p.model == "powerlaw")
        f = fit_power_law(x, y);
    else
        throw std::invalid_argument("unknown --model '" + p.model + "'");

    output_sink sink(g.out);
    csv_writer w(*sink.os);
    common_metadata(w, g, "fit");
    w.metadata("model", f.model);
    w.metadata("in", p.in);
    if (f.model == "fourier") {
        w.header({"a", "b", "c", "stderr_a", "stderr_b", "stderr_c", "residual_norm"});
        w.row({f.coeff[0], f.coeff[1], f.coeff[2], f.std_err[0], f.std_err[1], f.std_err[2],
               f.residual_norm});
    } else {
        w.header({"amplitude", "exponent", "stderr_amplitude", "stderr_exponent", "residual_norm"});
        w.row({f.coeff[0], f.coeff[1], f.std_err[0], f.std_err[1], f.residual_norm});
    }
}

struct regime_params {
    double g_rms = 1.0;
    double kappa = 100.0;
    int n = 16;
};

void run_regime_check(const global_options& g, const regime_params& p) {
    regime_check r = check_regime(g.big_gamma, p.g_rms, p.kappa, p.n);
    std::cout << (r.pass ? "PASS" : "FAIL") << " big_gamma/(g sqrtN)=" << format_double(r.ratio_lower)
              << " (g sqrtN)/kappa=" << format_double(r.ratio_upper) << "\n";
    if (!g.out.empty()) {
        output_sink sink(g.out);
        csv_writer w(*sink.os);
        common_metadata(w, g, "regime-check");
        w.header({"big_gamma", "g", "kappa", "n", "ratio_lower", "ratio_upper", "pass"});
        w.row({r.big_gamma, r.g_rms, r.kappa, static_cast<double>(r.n_atoms), r.ratio_lower,
               r.ratio_upper, r.pass ? 1.0 : 0.0});
    }
}

}  // namespace

int cli_dispatch(int argc, char** argv) {
    CLI::App app{"Collective-emission simulator for dark-state metrology"};
    app.require_subcommand(1);
    app.set_config("--config", "demsim.conf", "Read defaults from a key=value file");
    app.allow_config_extras(true);

    global_options g;
    app.add_option("--gamma", g.gamma, "Collective decay rate");
    app.add_option("--big-gamma", g.big_gamma, "Individual spontaneous rate");
    app.add_option("--delta-t", g.delta_t, "Counting window");
    app.add_option("--g1", g.g1, "Set-1 coupling during measurement");
    app.add_option("--g2", g.g2, "Set-2 coupling during measurement");
    app.add_option("--seed", g.seed, "Base seed for all stochastic runs");
    app.add_flag("--paper-units", g.paper_units, "Report alpha in units of gamma (g1-g2)^2");
    app.add_flag("--deterministic", g.deterministic, "Suppress the timestamp metadata line");
    app.add_option("--out", g.out, "Output CSV path (stdout when omitted)");
    app.add_option("--L", g.geo_l, "Cavity length");
    app.add_option("--n_x", g.geo_n_x, "Mode index");
    app.add_option("--x1_over_L", g.geo_x1_over_l, "First lattice position / L");
    app.add_option("--m", g.geo_m, "Whole wavelengths between the lattices");
    app.add_option("--g0", g.geo_g0, "Coupling amplitude prefactor");

    alpha_params ap;
    auto* alpha_cmd = app.add_subcommand("alpha", "Emission rate of one product state");
    alpha_cmd->fallthrough();
    alpha_cmd->add_option("--n", ap.n, "Number of atoms");
    alpha_cmd->add_option("--a", ap.a, "Pair amplitude on |00>");
    alpha_cmd->add_option("--b", ap.b, "Pair amplitude on the singlet");
    alpha_cmd->add_option("--c", ap.c, "Pair amplitude on the triplet-0");
    alpha_cmd->add_option("--d", ap.d, "Pair amplitude on |11>");

    sweep_params swp;
    auto* sweep_cmd = app.add_subcommand("sweep-delta", "Relaxed emission rate over a delta grid (exact, N <= 6)");
    sweep_cmd->fallthrough();
    sweep_cmd->add_option("--n", swp.n, "Number of atoms (2, 4 or 6)");
    sweep_cmd->add_option("--delta-grid", swp.grid, "Number of delta points on [0, pi/2]");

    scaling_params scp;
    auto* scaling_cmd = app.add_subcommand("scaling", "Emission rate versus system size");
    scaling_cmd->fallthrough();
    scaling_cmd->add_option("--states", scp.states, "ideal | relaxed | random-dfs | cat");
    scaling_cmd->add_option("--n", scp.n_list, "Range a:b:s or list");
    scaling_cmd->add_option("--delta", scp.delta, "Preparation angle");
    scaling_cmd->add_option("--b", scp.b, "Singlet amplitude");
    scaling_cmd->add_option("--nr", scp.nr, "Realizations override (0 = preset)");
    scaling_cmd->add_option("--samples", scp.samples, "Random-state samples per size");

    sse_params ssp;
    auto* sse_cmd = app.add_subcommand("sse", "Trajectory ensemble of the relaxed emission rate");
    sse_cmd->fallthrough();
    sse_cmd->add_option("--n", ssp.n, "Number of atoms");
    sse_cmd->add_option("--delta-grid", ssp.grid, "Number of delta points on [0, pi/2]");
    sse_cmd->add_option("--delta", ssp.deltas, "Explicit delta values (overrides the grid)");
    sse_cmd->add_option("--nr", ssp.nr, "Realizations (0 = preset)");
    sse_cmd->add_option("--dt", ssp.dt, "Euler step in units of 1/gamma");
    sse_cmd->add_option("--tol", ssp.tol, "Convergence tolerance on ||psi' - psi||");

    cat_params cp;
    auto* cat_cmd = app.add_subcommand("cat", "Photon count of the coupled-set singlet states");
    cat_cmd->fallthrough();
    cat_cmd->add_option("--n", cp.n_list, "Range a:b:s or list (multiples of 4)");

    random_dfs_params rp;
    auto* rdfs_cmd = app.add_subcommand("random-dfs", "Mean emission rate of random dark states");
    rdfs_cmd->fallthrough();
    rdfs_cmd->add_option("--n", rp.n_list, "Range a:b:s or list");
    rdfs_cmd->add_option("--samples", rp.samples, "Samples per size");

    noise_params np;
    auto* noise_cmd = app.add_subcommand("noise", "Coupling-fluctuation background, spread and SNR");
    noise_cmd->fallthrough();
    noise_cmd->add_option("--case", np.noise_case, "Correlation regime 1, 2 or 3");
    noise_cmd->add_option("--corr-file", np.corr_file, "Correlation matrix CSV (overrides --case)");
    noise_cmd->add_option("--n", np.n_list, "Range a:b:s or list");
    noise_cmd->add_option("--c-var", np.c_var, "Fluctuation variance");
    noise_cmd->add_option("--a", np.a, "Pair amplitude on |00>");
    noise_cmd->add_option("--b", np.b, "Pair amplitude on the singlet");

    calibrate_params kp;
    auto* cal_cmd = app.add_subcommand("calibrate", "Golden-section search for the dark lattice position");
    cal_cmd->fallthrough();
    cal_cmd->add_option("--n", kp.n, "Number of atoms in the full ensemble");
    cal_cmd->add_option("--gamma-dt", kp.gamma_dt, "Probe exposure gamma * delta_t");
    cal_cmd->add_option("--tol", kp.tol, "Bracket tolerance (0 = L/n)");
    cal_cmd->add_option("--bracket-lo", kp.bracket_lo, "Bracket start (0 = from the mode lobe)");
    cal_cmd->add_option("--bracket-hi", kp.bracket_hi, "Bracket end (0 = from the mode lobe)");
    cal_cmd->add_option("--trials", kp.trials, "Independent calibration runs");
    cal_cmd->add_flag("--noisy", kp.noisy, "Poisson-sample each probe");
    cal_cmd->add_option("--total-pairs", kp.total_pairs, "Pair budget (0 = 8n)");
    cal_cmd->add_option("--reserve", kp.reserve, "Pairs reserved for the final measurement (0 = n/2)");
    cal_cmd->add_option("--pairs-per-probe", kp.pairs_per_probe, "Batch size (0 = ceil(n / 2 ln n))");
    cal_cmd->add_option("--b", kp.b, "Singlet amplitude of probe pairs");

    fit_params fp;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a CSV column pair");
    fit_cmd->fallthrough();
    fit_cmd->add_option("--model", fp.model, "fourier | powerlaw");
    fit_cmd->add_option("--in", fp.in, "Input CSV")->required();
    fit_cmd->add_option("--xcol", fp.xcol, "X column name (default: first)");
    fit_cmd->add_option("--ycol", fp.ycol, "Y column name (default: second)");

    regime_params gp;
    auto* regime_cmd = app.add_subcommand("regime-check", "Verify big_gamma << g sqrt(N) << kappa");
    regime_cmd->fallthrough();
    regime_cmd->add_option("--g", gp.g_rms, "RMS coupling");
    regime_cmd->add_option("--kappa", gp.kappa, "Cavity linewidth");
    regime_cmd->add_option("--n", gp.n, "Number of atoms");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (alpha_cmd->parsed()) run_alpha(g, ap);
        else if (sweep_cmd->parsed()) run_sweep_delta(g, swp);
        else if (scaling_cmd->parsed()) run_scaling(g, scp);
        else if (sse_cmd->parsed()) run_sse(g, ssp);
        else if (cat_cmd->parsed()) run_cat(g, cp);
        else if (rdfs_cmd->parsed()) run_random_dfs(g, rp);
        else if (noise_cmd->parsed()) run_noise(g, np);
        else if (cal_cmd->parsed()) run_calibrate(g, kp);
        else if (fit_cmd->parsed()) run_fit(g, fp);
        else if (regime_cmd->parsed()) run_regime_check(g, gp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace demsim
