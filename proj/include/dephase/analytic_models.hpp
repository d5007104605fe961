#ifndef DEPHASE_ANALYTIC_MODELS_HPP
#define DEPHASE_ANALYTIC_MODELS_HPP

// Lorentzian decay F(t) = 1 / (1 + (gamma t)^2) of a thermal-like spectrum with
// exponential gap density, and the uniform-amplitude signal of a spectrum.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include "dephase/core.hpp"

namespace dephase {

struct LorentzianModel {
    double gamma = 1.0;
    double band_width = 40.0; // Delta E, used by the sinh form

    void validate() const {
        if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
    }
};

inline double lorentzian_F(double t, double gamma) {
    if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
    const double x = gamma * t;
    return 1.0 / (1.0 + x * x);
}

/// (gamma c^2 / 2) exp(-|w| / gamma).
inline double exp_gap_density(double omega, double gamma, double c = 1.0) {
    if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
    return 0.5 * gamma * c * c * std::exp(-std::abs(omega) / gamma);
}

/// Exact autoconvolution of c e^{-y/gamma} on a band of width Delta E, |w| <= Delta E:
/// gamma c^2 e^{-Delta E / gamma} sinh((Delta E - |w|) / gamma). Tends to the exponential form.
inline double exp_gap_density_sinh(double omega, double gamma, double band_width, double c = 1.0) {
    if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
    const double a = std::abs(omega);
    if (a > band_width) throw DomainError("|w| exceeds the band width");
    // e^{-D/g} sinh((D - a)/g) = (e^{-a/g} - e^{-(2D - a)/g}) / 2
    return 0.5 * gamma * c * c * (std::exp(-a / gamma) - std::exp(-(2.0 * band_width - a) / gamma));
}

/// sqrt(int w^2 rho^2 / int rho^2) over |w| <= 40 gamma with step gamma/200.
inline double lorentzian_dispersion(double gamma) {
    if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
    // Even integrand: Simpson on [0, 40 gamma] avoids the kink at zero.
    const std::size_t samples = 8001;
    const double h = 40.0 * gamma / static_cast<double>(samples - 1);
    std::vector<double> m0(samples), m2(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const double w = static_cast<double>(k) * h;
        const double r = exp_gap_density(w, gamma);
        m0[k] = r * r;
        m2[k] = w * w * r * r;
    }
    return std::sqrt(simpson(m2, h) / simpson(m0, h));
}

/// T_eq = pi sqrt2 / gamma.
inline double lorentzian_teq(double gamma) {
    if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
    return kPi * std::numbers::sqrt2 / gamma;
}

/// Delta t = sqrt(int t^2 F^2 dt / int F^2 dt) over the real line, by the
/// substitution t = tan(theta) / gamma on a uniform theta grid.
inline double lorentzian_time_spread(double gamma, std::size_t samples = 20001) {
    if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
    const double h = kPi / static_cast<double>(samples - 1);
    std::vector<double> m0(samples), m2(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const double th = -0.5 * kPi + static_cast<double>(k) * h;
        const double c = std::cos(th), s = std::sin(th);
        // F^2 dt = cos^2 dtheta / gamma, t^2 F^2 dt = sin^2 dtheta / gamma^3.
        m0[k] = c * c / gamma;
        m2[k] = s * s / (gamma * gamma * gamma);
    }
    return std::sqrt(trapezoid(m2, h) / trapezoid(m0, h));
}

/// F(t) = (1 / (d (d-1))) sum_{i != j} exp(i (E_j - E_i) t), evaluated as
/// (|sum_k e^{i E_k t}|^2 - d) / (d (d-1)).
inline SignalGrid reimann_F(const std::vector<double>& energies, const UniformAxis& t_axis, double degeneracy_tol = 0.0) {
    const std::size_t d = energies.size();
    if (d < 2) throw NoDynamics("fewer than two levels");
    double lo = energies[0], hi = energies[0];
    for (double e : energies) {
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (hi - lo <= degeneracy_tol) throw NoDynamics("all levels are degenerate: no gaps retained");
    SignalGrid out(t_axis);
    const double norm = 1.0 / (static_cast<double>(d) * static_cast<double>(d - 1));
    for (std::size_t j = 0; j < t_axis.size(); ++j) {
        const double t = t_axis[j];
        cplx s{};
        for (double e : energies) s += std::polar(1.0, e * t);
        out.values[j] = (std::norm(s) - static_cast<double>(d)) * norm;
    }
    return out;
}

/// Levels sampled from the density exp(-E / gamma) / gamma by inverse CDF.
template <class Rng>
std::vector<double> exponential_levels(std::size_t count, double gamma, Rng& rng) {
    std::vector<double> e(count);
    for (auto& x : e) x = -gamma * std::log1p(-rng.uniform());
    return e;
}

inline void write_lorentzian_csv(std::ostream& os, double gamma, const UniformAxis& t_axis) {
    os << "t,F\n";
    os.precision(17);
    for (std::size_t k = 0; k < t_axis.size(); ++k) os << t_axis[k] << ',' << lorentzian_F(t_axis[k], gamma) << '\n';
}

inline void write_gap_density_csv(std::ostream& os, double gamma, double band_width, const UniformAxis& w_axis) {
    os << "omega,rho_exp,rho_sinh\n";
    os.precision(17);
    for (std::size_t k = 0; k < w_axis.size(); ++k) {
        const double w = w_axis[k];
        os << w << ',' << exp_gap_density(w, gamma) << ',';
        if (std::abs(w) <= band_width) os << exp_gap_density_sinh(w, gamma, band_width);
        else os << "nan";
        os << '\n';
    }
}

} // namespace dephase

#endif // DEPHASE_ANALYTIC_MODELS_HPP
