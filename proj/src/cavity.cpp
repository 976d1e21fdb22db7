#include "demsim/cavity.hpp"

#include <cmath>
#include <stdexcept>

#include "demsim/signal.hpp"

namespace demsim {

cavity_geometry::cavity_geometry(double length_, int n_x_, double x1_, int m_, double g0_)
    : length(length_), n_x(n_x_), x1(x1_), m(m_), g0(g0_) {
    if (!(length > 0.0)) throw std::invalid_argument("cavity length must be positive");
    if (n_x < 2) throw std::invalid_argument("mode index must be >= 2");
    if (m < 1 || m > n_x - 1) throw std::invalid_argument("need 1 <= m <= n_x - 1");
    if (!(g0 > 0.0)) throw std::invalid_argument("g0 must be positive");
    if (!(x1 > 0.0) || !(x2() < length)) throw std::invalid_argument("lattices must lie inside the cavity");
}

double cavity_geometry::phase1() const { return n_x * M_PI * x1 / length; }

double cavity_geometry::g_norm() const {
    double s1 = std::abs(g0 * std::sin(phase1()));
    double s2 = std::abs(g0 * std::sin(n_x * M_PI * x2() / length));
    return std::sqrt(0.5 * (s1 * s1 + s2 * s2));
}

double coupling_at(const cavity_geometry& geo, double x) {
    if (!(x > 0.0) || !(x < geo.length)) throw std::invalid_argument("position outside the cavity");
    double gn = geo.g_norm();
    if (gn < 1e-300) throw std::invalid_argument("degenerate geometry: reference coupling vanishes");
    return geo.g0 * std::sin(geo.n_x * M_PI * x / geo.length) / gn;
}

namespace {
double cot_phase1(const cavity_geometry& geo) {
    double p = geo.phase1();
    double s = std::sin(p), c = std::cos(p);
    if (std::abs(c) < 1e-12) throw std::invalid_argument("degenerate geometry: lattice at an antinode");
    if (std::abs(s) < 1e-12) throw std::invalid_argument("degenerate geometry: lattice at a node");
    return c / s;
}
}  // namespace

double delta_g_from_delta_l(const cavity_geometry& geo, double delta_l_over_l) {
    return geo.m * M_PI * cot_phase1(geo) * delta_l_over_l;
}

double delta_g_slope_per_offset(const cavity_geometry& geo) {
    return 0.5 * geo.n_x * M_PI / geo.length * std::abs(cot_phase1(geo));
}

long default_pairs_per_probe(int n_atoms) {
    if (n_atoms < 3) throw std::invalid_argument("need n_atoms >= 3");
    return static_cast<long>(std::ceil(n_atoms / (2.0 * std::log(static_cast<double>(n_atoms)))));
}

calibration_result calibrate_golden_section(const std::function<double(double)>& measure,
                                            double x_lo, double x_hi, double tol,
                                            calibration_budget& budget) {
    if (x_hi < x_lo) throw std::invalid_argument("inverted bracket");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (budget.pairs_per_probe < 1) throw std::invalid_argument("pairs_per_probe must be >= 1");

    calibration_result out;
    if (x_hi - x_lo <= tol) {
        out.x_hat = 0.5 * (x_lo + x_hi);
        out.bracket_lo = x_lo;
        out.bracket_hi = x_hi;
        out.probes_used = 0;
        return out;
    }

    const double inv_phi = 0.61803398874989484820;  // 1/phi
    double lo = x_lo, hi = x_hi;
    auto probe = [&](double x) {
        if (!budget.can_probe())
            throw calibration_error("pair budget exhausted during calibration", lo, hi,
                                    budget.probes_used);
        ++budget.probes_used;
        return measure(x);
    };

    double c = hi - (hi - lo) * inv_phi;
    double d = lo + (hi - lo) * inv_phi;
    double fc = probe(c);
    double fd = probe(d);
    long used = 2;
    while (hi - lo > tol) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - (hi - lo) * inv_phi;
            fc = probe(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + (hi - lo) * inv_phi;
            fd = probe(d);
        }
        ++used;
    }
    out.x_hat = 0.5 * (lo + hi);
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    out.probes_used = used;
    return out;
}

probe_model make_probe_model(const cavity_geometry& geo, double x_star, int n_sub, double b,
                             double gamma_dt, double bracket_lo, double bracket_hi) {
    if (!(gamma_dt > 0.0)) throw std::invalid_argument("gamma_dt must be positive");
    if (bracket_hi < bracket_lo) throw std::invalid_argument("inverted bracket");
    if (x_star < bracket_lo || x_star > bracket_hi) throw std::invalid_argument("dark position outside bracket");
    if (!(bracket_lo > 0.0) || !(bracket_hi < geo.length))
        throw std::invalid_argument("bracket outside the cavity");
    // reject brackets that cross a node: the response is only unimodal inside
    // one lobe of the mode
    double node_spacing = geo.length / geo.n_x;
    if (std::floor(bracket_lo / node_spacing) != std::floor(bracket_hi / node_spacing))
        throw std::invalid_argument("bracket crosses a node of the mode");

    probe_model pm;
    pm.x_star = x_star;
    pm.kappa = delta_g_slope_per_offset(geo);
    pm.f_sub = f_factor(n_sub, b);
    pm.gamma_dt = gamma_dt;
    return pm;
}

}  // namespace demsim
