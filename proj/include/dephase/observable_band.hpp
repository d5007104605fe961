#ifndef DEPHASE_OBSERVABLE_BAND_HPP
#define DEPHASE_OBSERVABLE_BAND_HPP

// Observables in the energy eigenbasis: the band profile S(w) of |A_ij|^2,
// its moments, the exponential locality envelope for local operators and the
// factorisation |g~_eps(w)|^2 = 2 pi N_{sqrt2 sigma_E}(w) S(w) rho_eps(w).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "dephase/coarse_grain.hpp"
#include "dephase/core.hpp"
#include "dephase/dephasing_signal.hpp"
#include "dephase/lattice_model.hpp"
#include "dephase/spectral.hpp"

namespace dephase {

struct EnergyBasisMatrix {
    MatrixXc entries; // A_ij = <E_i|A|E_j>
    Eigen::VectorXd energies;

    Eigen::Index dim() const { return energies.size(); }
};

/// V^dagger A V.
inline EnergyBasisMatrix to_energy_basis(const OperatorMatrix& a, const Spectrum& spec) {
    if (a.dim() != spec.dim()) throw ArgumentError("operator and spectrum dimensions differ");
    EnergyBasisMatrix out;
    out.energies = spec.energies;
    if (a.is_real() && spec.vectors.imag().cwiseAbs().maxCoeff() == 0.0) {
        const Eigen::MatrixXd v = spec.vectors.real();
        const Eigen::MatrixXd av = a.entries.real() * v;
        out.entries = (v.transpose() * av).cast<cplx>();
    } else {
        const MatrixXc av = a.entries * spec.vectors;
        out.entries = spec.vectors.adjoint() * av;
    }
    return out;
}

struct BandWeighting {
    enum class Kind { uniform, gaussian, window } kind = Kind::uniform;
    double mu = 0.0;
    double sigma = 1.0;

    static BandWeighting uniform() { return {}; }
    /// N_{sigma/sqrt2}(E_bar - mu).
    static BandWeighting gaussian(double mu, double sigma) {
        if (!(sigma > 0.0)) throw ArgumentError("gaussian weighting needs sigma > 0");
        return {Kind::gaussian, mu, sigma};
    }
    /// Uniform over the E_bar range where the gaussian weight is at least half its peak.
    static BandWeighting window(double mu, double sigma) {
        if (!(sigma > 0.0)) throw ArgumentError("window weighting needs sigma > 0");
        return {Kind::window, mu, sigma};
    }

    double operator()(double e_bar) const {
        const double s = sigma / std::numbers::sqrt2;
        switch (kind) {
        case Kind::gaussian: return dephase::gaussian(e_bar - mu, s);
        case Kind::window: return std::abs(e_bar - mu) <= s * std::sqrt(2.0 * std::numbers::ln2) ? 1.0 : 0.0;
        default: return 1.0;
        }
    }
};

/// Weighted mean of |A_ij|^2 over pairs i > j binned by w = E_i - E_j >= 0.
/// Bin k covers [k b, (k+1) b) and is reported at its centre.
struct BandProfile {
    double bin_width = 0.0;
    std::vector<double> centers;
    std::vector<double> values;
    std::vector<std::size_t> counts;
    std::vector<double> weights; // summed pair weights per bin

    std::size_t size() const { return centers.size(); }
    bool defined(std::size_t k) const { return counts[k] > 0 && weights[k] > 0.0; }

    /// Piecewise-linear interpolation between defined bin centres; S is even in w.
    double at(double omega) const {
        const double w = std::abs(omega);
        if (centers.empty()) return 0.0;
        const double pos = w / bin_width - 0.5;
        if (pos <= 0.0) return defined(0) ? values[0] : 0.0;
        const auto k = static_cast<std::size_t>(pos);
        if (k + 1 >= size()) return (k < size() && defined(k)) ? values[k] : 0.0;
        const double f = pos - static_cast<double>(k);
        const double a = defined(k) ? values[k] : 0.0;
        const double b = defined(k + 1) ? values[k + 1] : 0.0;
        return (1.0 - f) * a + f * b;
    }
};

inline BandProfile band_profile(const EnergyBasisMatrix& ebm, BandWeighting weighting, double bin_width) {
    if (!(bin_width > 0.0)) throw ArgumentError("bin width must be positive");
    const Eigen::Index d = ebm.dim();
    BandProfile p;
    p.bin_width = bin_width;
    const double span = d > 0 ? ebm.energies.maxCoeff() - ebm.energies.minCoeff() : 0.0;
    const auto nbins = static_cast<std::size_t>(std::floor(span / bin_width)) + 1;
    std::vector<double> num(nbins, 0.0), den(nbins, 0.0);
    p.counts.assign(nbins, 0);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            if (i == j) continue;
            const double w = ebm.energies(i) - ebm.energies(j);
            if (w < 0.0 || (w == 0.0 && i < j)) continue;
            const auto k = std::min(static_cast<std::size_t>(w / bin_width), nbins - 1);
            const double wt = weighting(0.5 * (ebm.energies(i) + ebm.energies(j)));
            if (wt == 0.0) continue;
            num[k] += wt * std::norm(ebm.entries(i, j));
            den[k] += wt;
            ++p.counts[k];
        }
    }
    p.centers.resize(nbins);
    p.values.assign(nbins, 0.0);
    p.weights = den;
    for (std::size_t k = 0; k < nbins; ++k) {
        p.centers[k] = (static_cast<double>(k) + 0.5) * bin_width;
        if (den[k] > 0.0) p.values[k] = num[k] / den[k];
    }
    return p;
}

struct BandMoments {
    double mu = 0.0;
    double sigma = 0.0;
};

namespace detail {

inline double interpolate(const SignalGrid& g, double x) {
    const auto& ax = g.axis;
    if (x < ax.front() || x > ax.back()) return 0.0;
    const double pos = (x - ax.front()) / ax.step();
    const auto k = std::min(static_cast<std::size_t>(pos), ax.size() - 1);
    if (k + 1 >= ax.size()) return g.values[k].real();
    const double f = pos - static_cast<double>(k);
    return (1.0 - f) * g.values[k].real() + f * g.values[k + 1].real();
}

} // namespace detail

/// mu_A and sigma_A of the weight S(w) rho_eps(w) over w >= eps, with each
/// bin treated as a point mass at its centre.
inline BandMoments sigma_A(const BandProfile& profile, const SignalGrid& rho_eps, double epsilon) {
    double m0 = 0.0, m1 = 0.0;
    std::vector<double> w(profile.size(), 0.0);
    for (std::size_t k = 0; k < profile.size(); ++k) {
        if (!profile.defined(k) || profile.centers[k] < epsilon) continue;
        w[k] = profile.bin_width * profile.values[k] * detail::interpolate(rho_eps, profile.centers[k]);
        m0 += w[k];
        m1 += w[k] * profile.centers[k];
    }
    if (!(m0 > 0.0)) throw NoBandWeight("band profile carries no weight above eps");
    const double mu = m1 / m0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < profile.size(); ++k) m2 += w[k] * (profile.centers[k] - mu) * (profile.centers[k] - mu);
    return {mu, std::sqrt(m2 / m0)};
}

/// Default lattice-animal constant of a chain: 2 D e with D = 1.
inline constexpr double kChainAnimalConstant = 2.0 * std::numbers::e;

/// ||A|| (e w / (J (1 + alpha))) exp(-c w / J), c = log(1 + 1/alpha), valid for w / J > alpha.
inline double banded_bound(double omega, double op_norm, double J, double alpha = kChainAnimalConstant) {
    if (!(J > 0.0) || !(alpha > 0.0)) throw ArgumentError("J and alpha must be positive");
    if (!(omega / J > alpha))
        throw OutsideValidity("w/J = " + std::to_string(omega / J) + " is not above alpha = " + std::to_string(alpha));
    const double c = std::log1p(1.0 / alpha);
    return op_norm * (std::numbers::e * omega / (J * (1.0 + alpha))) * std::exp(-c * omega / J);
}

struct BoundViolation {
    Eigen::Index i, j;
    double omega, element, bound;
};

struct BandBoundReport {
    std::size_t pairs_checked = 0;
    double max_ratio = 0.0; // max |A_ij| / bound
    std::vector<BoundViolation> violations;
    bool holds() const { return violations.empty(); }
};

/// Checks |A_ij| <= envelope(|E_i - E_j|) for every pair with |E_i - E_j| / J > alpha.
/// `envelope_scale` multiplies the single-term bound (n for summed local terms).
inline BandBoundReport banded_bound_check(const EnergyBasisMatrix& ebm, double op_norm, double J,
                                          double alpha = kChainAnimalConstant, double envelope_scale = 1.0) {
    BandBoundReport r;
    const Eigen::Index d = ebm.dim();
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = j + 1; i < d; ++i) {
            const double w = std::abs(ebm.energies(i) - ebm.energies(j));
            if (!(w / J > alpha)) continue;
            ++r.pairs_checked;
            const double b = envelope_scale * banded_bound(w, op_norm, J, alpha);
            const double a = std::abs(ebm.entries(i, j));
            r.max_ratio = std::max(r.max_ratio, a / b);
            if (a > b && r.violations.size() < 100) r.violations.push_back({i, j, w, a, b});
        }
    }
    return r;
}

/// Pointwise Gaussian identity used by the factorisation:
/// N_s(E - w/2 - mu) N_s(E + w/2 - mu) = N_{s/sqrt2}(E - mu) N_{sqrt2 s}(w).
inline double gaussian_product_defect(double e, double omega, double mu, double sigma) {
    const double lhs = gaussian(e - 0.5 * omega - mu, sigma) * gaussian(e + 0.5 * omega - mu, sigma);
    const double rhs = gaussian(e - mu, sigma / std::numbers::sqrt2) * gaussian(omega, std::numbers::sqrt2 * sigma);
    return std::abs(lhs - rhs);
}

struct FactorizationReport {
    std::size_t points = 0; // grid points with |g~|^2 above 1% of its maximum
    double median_rel_error = 0.0;
    double q90_rel_error = 0.0;
    double max_rel_error = 0.0;
    double lhs_max = 0.0;
    double rhs_max = 0.0;
};

/// Compares |g~_eps(w)|^2 with 2 pi N_{sqrt2 sigma_E}(w) S(w) rho_eps(w) on the
/// grid of rho_eps.
inline FactorizationReport factorization_check(const GapAmplitudeSet& gas, const BandProfile& profile,
                                               const SignalGrid& rho_eps, double sigma_e, double epsilon) {
    if (!(sigma_e > 0.0)) throw DegenerateDensity("sigma_E must be positive");
    FactorizationReport rep;
    std::vector<double> lhs(rho_eps.size(), 0.0), rhs(rho_eps.size(), 0.0);
    if (!gas.empty()) {
        SignalGrid gt(rho_eps.axis);
        const double inv = 1.0 / epsilon;
        for (std::size_t k = 0; k < gas.size(); ++k)
            detail::add_gaussian(gt.values, rho_eps.axis, gas.gaps[k], epsilon, gas.amps[k] * inv);
        for (std::size_t k = 0; k < gt.size(); ++k) lhs[k] = std::norm(gt.values[k]);
    }
    for (std::size_t k = 0; k < rho_eps.size(); ++k) {
        const double w = rho_eps.axis[k];
        rhs[k] = 2.0 * kPi * gaussian(w, std::numbers::sqrt2 * sigma_e) * profile.at(w) * rho_eps.values[k].real();
    }
    rep.lhs_max = lhs.empty() ? 0.0 : *std::max_element(lhs.begin(), lhs.end());
    rep.rhs_max = rhs.empty() ? 0.0 : *std::max_element(rhs.begin(), rhs.end());
    std::vector<double> rel;
    for (std::size_t k = 0; k < lhs.size(); ++k) {
        if (rep.lhs_max == 0.0 || lhs[k] < 0.01 * rep.lhs_max) continue;
        rel.push_back(std::abs(lhs[k] - rhs[k]) / lhs[k]);
    }
    rep.points = rel.size();
    if (!rel.empty()) {
        rep.median_rel_error = detail::quantile(rel, 0.5);
        rep.q90_rel_error = detail::quantile(rel, 0.9);
        rep.max_rel_error = *std::max_element(rel.begin(), rel.end());
    }
    return rep;
}

inline void write_band_csv(std::ostream& os, const BandProfile& p, double op_norm, double J, double alpha) {
    os << "omega,S,count,bound\n";
    os.precision(17);
    for (std::size_t k = 0; k < p.size(); ++k) {
        os << p.centers[k] << ',';
        if (p.defined(k)) os << p.values[k];
        else os << "nan";
        os << ',' << p.counts[k] << ',';
        if (p.centers[k] / J > alpha) os << banded_bound(p.centers[k], op_norm, J, alpha);
        else os << "nan";
        os << '\n';
    }
}

} // namespace dephase

#endif // DEPHASE_OBSERVABLE_BAND_HPP
