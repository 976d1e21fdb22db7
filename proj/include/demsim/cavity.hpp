#pragma once

#include <functional>

#include "demsim/hilbert.hpp"

namespace demsim {

// Sine mode of a cavity of length L with mode index n_x. The two lattice
// sites sit a whole number m of wavelengths apart (lambda = 2L/n_x), so both
// see the same coupling at the reference length. g0 absorbs every mode-scale
// constant into one positive prefactor.
struct cavity_geometry {
    double length;   // L
    int n_x;
    double x1;
    int m;           // x2 = x1 + m lambda
    double g0;

    cavity_geometry(double length_, int n_x_, double x1_, int m_, double g0_);
    double wavelength() const { return 2.0 * length / n_x; }
    double x2() const { return x1 + m * wavelength(); }
    double phase1() const;   // n_x pi x1 / L
    double g_norm() const;   // rms of |g| over the two sites at reference
};

// Normalized coupling g0 sin(n_x pi x / L) / g_norm at a position inside the
// cavity.
double coupling_at(const cavity_geometry& geo, double x);

// First-order coupling shift of a relative length change:
// dg = m pi cot(n_x pi x1 / L) dL/L. Throws at an antinode.
double delta_g_from_delta_l(const cavity_geometry& geo, double delta_l_over_l);

// Sensitivity of dg to moving the second lattice by u at fixed length:
// |d(dg)/du| = (n_x pi / (2 L)) |cot(n_x pi x1 / L)|.
double delta_g_slope_per_offset(const cavity_geometry& geo);

// Probe batches drawn from a fixed supply of prepared pairs. The reserve is
// held back for the final measurement.
struct calibration_budget {
    long total_pairs = 0;
    long pairs_per_probe = 1;
    long reserve = 0;
    long probes_used = 0;

    bool can_probe() const { return (probes_used + 1) * pairs_per_probe <= total_pairs - reserve; }
};

long default_pairs_per_probe(int n_atoms);  // ceil(N / (2 ln N))

struct calibration_result {
    double x_hat = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    long probes_used = 0;
};

// Raised when the pair budget runs out; carries the best bracket so far.
class calibration_error : public std::runtime_error {
public:
    calibration_error(const std::string& what, double lo, double hi, long probes)
        : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi), probes_used(probes) {}
    double bracket_lo, bracket_hi;
    long probes_used;
};

// Golden-section minimization of a probe response over [x_lo, x_hi]. Each
// measure() call consumes one probe batch. Stops when the bracket is no wider
// than tol; for a unimodal noiseless response the bracket always contains the
// minimum, and at most ceil(log((x_hi-x_lo)/tol)/log phi) + 2 probes are used.
calibration_result calibrate_golden_section(const std::function<double(double)>& measure,
                                            double x_lo, double x_hi, double tol,
                                            calibration_budget& budget);

// Expected probe count: gamma_dt (kappa (x - x_star))^2 f(n_sub, b), the
// linearized response of a probe batch of n_sub atoms around the dark
// position x_star. Brackets crossing a node of the mode are rejected.
struct probe_model {
    double x_star = 0.0;
    double kappa = 0.0;
    double f_sub = 0.0;
    double gamma_dt = 0.0;

    double mean(double x) const {
        double u = kappa * (x - x_star);
        return gamma_dt * u * u * f_sub;
    }
};

probe_model make_probe_model(const cavity_geometry& geo, double x_star, int n_sub, double b,
                             double gamma_dt, double bracket_lo, double bracket_hi);

}  // namespace demsim
