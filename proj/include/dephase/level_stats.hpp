#ifndef DEPHASE_LEVEL_STATS_HPP
#define DEPHASE_LEVEL_STATS_HPP

// Synthetic spectra with Poisson or Wigner-Dyson spacings, block resampling
// between the two laws, and the one-norm distinguishability of their
// coarse-grained frequency signals.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "dephase/coarse_grain.hpp"
#include "dephase/core.hpp"
#include "dephase/dephasing_signal.hpp"
#include "dephase/random.hpp"

namespace dephase {

enum class SpacingLaw { poisson, wigner_dyson };

inline std::string to_string(SpacingLaw l) { return l == SpacingLaw::poisson ? "poisson" : "wigner_dyson"; }

inline SpacingLaw parse_spacing_law(const std::string& s) {
    if (s == "poisson") return SpacingLaw::poisson;
    if (s == "wigner_dyson" || s == "wigner-dyson" || s == "wd") return SpacingLaw::wigner_dyson;
    throw ArgumentError("spacing law must be poisson or wigner_dyson, got '" + s + "'");
}

/// Density of the spacing law with mean mu.
inline double spacing_pdf(SpacingLaw law, double s, double mu) {
    if (s < 0.0) return 0.0;
    if (law == SpacingLaw::poisson) return std::exp(-s / mu) / mu;
    return kPi * s / (2.0 * mu * mu) * std::exp(-kPi * s * s / (4.0 * mu * mu));
}

inline double spacing_cdf(SpacingLaw law, double s, double mu) {
    if (s <= 0.0) return 0.0;
    if (law == SpacingLaw::poisson) return -std::expm1(-s / mu);
    return -std::expm1(-kPi * s * s / (4.0 * mu * mu));
}

/// Inverse-CDF sampling from a stream.
inline double sample_spacing(SpacingLaw law, double mu, RandomStream& rs) {
    const double u = rs.uniform();
    if (law == SpacingLaw::poisson) return -mu * std::log1p(-u);
    return mu * std::sqrt(-(4.0 / kPi) * std::log1p(-u));
}

inline std::vector<double> sample_spacings(SpacingLaw law, double mu, std::size_t count, RandomStream& rs) {
    if (count < 1) throw ArgumentError("need at least one spacing");
    if (!(mu > 0.0)) throw ArgumentError("mean spacing must be positive");
    std::vector<double> s(count);
    for (auto& x : s) x = sample_spacing(law, mu, rs);
    return s;
}

inline std::vector<double> sample_spacings(SpacingLaw law, double mu, std::size_t count, std::uint64_t seed) {
    RandomStream rs(seed);
    return sample_spacings(law, mu, count, rs);
}

struct SyntheticSpectrum {
    std::vector<double> energies;
    SpacingLaw law = SpacingLaw::poisson;
    double mean_spacing = 1.0;
    std::uint64_t seed = 0;

    std::size_t size() const { return energies.size(); }
};

/// E_0, E_0 + s_0, E_0 + s_0 + s_1, ...
inline SyntheticSpectrum build_spectrum(const std::vector<double>& spacings, double e0, SpacingLaw law = SpacingLaw::poisson,
                                        double mu = 1.0, std::uint64_t seed = 0) {
    SyntheticSpectrum out{{e0}, law, mu, seed};
    out.energies.reserve(spacings.size() + 1);
    for (double s : spacings) {
        if (!(s > 0.0)) throw ArgumentError("spacings must be positive");
        out.energies.push_back(out.energies.back() + s);
    }
    return out;
}

inline SyntheticSpectrum generate_spectrum(SpacingLaw law, double mu, std::size_t levels, std::uint64_t seed,
                                           double e0 = 0.0) {
    if (levels < 1) throw ArgumentError("need at least one level");
    std::vector<double> s;
    if (levels > 1) s = sample_spacings(law, mu, levels - 1, seed);
    return build_spectrum(s, e0, law, mu, seed);
}

/// Levels are grouped into blocks of L that share their end levels
/// (block b spans indices b(L-1) .. b(L-1) + L-1). End levels stay fixed; the
/// L-2 interior levels are redrawn from law2 spacings rescaled to the block
/// span. A trailing partial block with at least three levels is treated the
/// same way. Block b draws from stream split(b).
inline SyntheticSpectrum block_resample(const SyntheticSpectrum& s1, std::size_t L, SpacingLaw law2,
                                        std::uint64_t seed) {
    if (L < 3) throw ArgumentError("block size must be at least 3");
    if (L > s1.size()) throw ArgumentError("block size exceeds the number of levels");
    SyntheticSpectrum out = s1;
    out.law = law2;
    out.seed = seed;
    const RandomStream root(seed);
    std::size_t begin = 0;
    std::uint64_t block = 0;
    while (begin + 2 < s1.size()) {
        const std::size_t end = std::min(begin + L - 1, s1.size() - 1);
        const std::size_t gaps = end - begin;
        RandomStream rs = root.split(block++);
        auto sp = sample_spacings(law2, s1.mean_spacing, gaps, rs);
        const double total = std::accumulate(sp.begin(), sp.end(), 0.0);
        const double scale = (s1.energies[end] - s1.energies[begin]) / total;
        double e = s1.energies[begin];
        for (std::size_t k = 1; k < gaps; ++k) {
            e += sp[k - 1] * scale;
            out.energies[begin + k] = e;
        }
        if (end == s1.size() - 1) break;
        begin = end;
    }
    return out;
}

/// Spacings within each block divided by that block's mean spacing.
inline std::vector<double> block_normalized_spacings(const SyntheticSpectrum& s, std::size_t L) {
    std::vector<double> out;
    std::size_t begin = 0;
    while (begin + 1 < s.size()) {
        const std::size_t end = std::min(begin + L - 1, s.size() - 1);
        const double mean = (s.energies[end] - s.energies[begin]) / static_cast<double>(end - begin);
        for (std::size_t k = begin; k < end; ++k) out.push_back((s.energies[k + 1] - s.energies[k]) / mean);
        begin = end;
    }
    return out;
}

/// sup |empirical CDF - law CDF|.
inline double kolmogorov_distance(std::vector<double> samples, SpacingLaw law, double mu) {
    if (samples.empty()) throw ArgumentError("no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double f = spacing_cdf(law, samples[k], mu);
        d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
    }
    return d;
}

inline double max_displacement(const SyntheticSpectrum& a, const SyntheticSpectrum& b) {
    if (a.size() != b.size()) throw ArgumentError("spectra differ in size");
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.energies[k] - b.energies[k]));
    return m;
}

/// int |g1 - g2| dw by the trapezoid rule.
inline double one_norm_distance(const SignalGrid& g1, const SignalGrid& g2) {
    if (!g1.axis.same_as(g2.axis)) throw ArgumentError("signals live on different grids");
    std::vector<double> diff(g1.size());
    for (std::size_t k = 0; k < g1.size(); ++k) diff[k] = std::abs(g1.values[k] - g2.values[k]);
    return trapezoid(diff, g1.axis.step());
}

/// Amplitudes attached to level pairs (i < j), shared between spectra.
struct PairAmplitudes {
    struct Pair {
        std::size_t i, j;
        cplx v;
    };
    std::vector<Pair> pairs;

    double one_norm() const {
        double s = 0.0;
        for (const auto& p : pairs) s += 2.0 * std::abs(p.v);
        return s;
    }
};

/// Banded amplitudes v_ij proportional to exp(-(i-j)^2 / 2 b^2) over |i-j| <= 6b,
/// scaled so that sum over both mirror halves of |v| is one.
inline PairAmplitudes banded_pair_amplitudes(std::size_t levels, double band) {
    if (!(band > 0.0)) throw ArgumentError("band width must be positive");
    PairAmplitudes pa;
    const auto reach = static_cast<std::size_t>(std::ceil(6.0 * band));
    for (std::size_t i = 0; i < levels; ++i)
        for (std::size_t j = i + 1; j < levels && j - i <= reach; ++j) {
            const double d = static_cast<double>(j - i);
            pa.pairs.push_back({i, j, cplx(std::exp(-0.5 * d * d / (band * band)), 0.0)});
        }
    const double norm = pa.one_norm();
    for (auto& p : pa.pairs) p.v /= norm;
    return pa;
}

/// Gap set with G = E_j - E_i for each pair and its mirror image.
inline GapAmplitudeSet attach_gaps(const PairAmplitudes& pa, const std::vector<double>& energies) {
    std::vector<detail::PositiveGap> pos;
    pos.reserve(pa.pairs.size());
    for (const auto& p : pa.pairs) {
        if (p.i >= energies.size() || p.j >= energies.size()) throw ArgumentError("pair index out of range");
        const double g = energies[p.j] - energies[p.i];
        if (g > 0.0) pos.push_back({g, p.v});
        else if (g < 0.0) pos.push_back({-g, std::conj(p.v)});
    }
    std::stable_sort(pos.begin(), pos.end(),
                     [](const detail::PositiveGap& a, const detail::PositiveGap& b) { return a.gap < b.gap; });
    return detail::mirror(pos, 1.0, 0.0, 0.0);
}

struct DistinguishabilityReport {
    double delta1 = 0.0; // ||g~1 - g~2||_1
    double delta2 = 0.0;
    double epsilon = 0.0;
    double window = 0.0; // sqrt(delta2) / eps
    std::size_t samples = 0;
    double max_deviation = 0.0; // max |g1(t) - g2(t)| over the window
    double margin = 0.0;        // delta1 + delta2 - max_deviation
    std::size_t violations = 0;
    bool holds() const { return violations == 0; }
};

/// |g1(t) - g2(t)| < delta1 + delta2 for sampled t <= sqrt(delta2)/eps, with
/// delta1 the one-norm distance of the coarse-grained frequency signals.
/// The amplitudes must satisfy sum |v| <= 1.
inline DistinguishabilityReport distinguishability_check(const PairAmplitudes& pa, const SyntheticSpectrum& s1,
                                                         const SyntheticSpectrum& s2, double epsilon, double delta2,
                                                         const UniformAxis& t_axis) {
    if (!(delta2 > 0.0 && delta2 < 2.0)) throw ArgumentError("delta2 must lie in (0, 2)");
    if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
    if (pa.one_norm() > 1.0 + 1e-12) throw ArgumentError("amplitudes must satisfy sum |v| <= 1");
    const auto g1 = attach_gaps(pa, s1.energies);
    const auto g2 = attach_gaps(pa, s2.energies);
    const double reach = std::max(g1.max_abs_gap(), g2.max_abs_gap()) + 6.0 * epsilon;
    const CoarseGrainConfig cfg{epsilon, UniformAxis::covering(-reach, reach, epsilon / 10.0), 0.0};

    DistinguishabilityReport r;
    r.delta2 = delta2;
    r.epsilon = epsilon;
    r.window = std::sqrt(delta2) / epsilon;
    r.delta1 = one_norm_distance(cg_frequency_signal(g1, cfg), cg_frequency_signal(g2, cfg));

    std::vector<double> times;
    for (double t : t_axis.values())
        if (t >= 0.0 && t <= r.window) times.push_back(t);
    const auto a = time_signal_at(g1, times);
    const auto b = time_signal_at(g2, times);
    r.samples = times.size();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double d = std::abs(a[k] - b[k]);
        r.max_deviation = std::max(r.max_deviation, d);
        if (!(d < r.delta1 + delta2)) ++r.violations;
    }
    r.margin = r.delta1 + delta2 - r.max_deviation;
    return r;
}

/// h_eps(w - G1) - h_eps(w - G2) against 2 eps h_eps(w - Gbar) h_eps(d) sinh(d (w - Gbar) / eps^2)
/// with Gbar = (G1 + G2)/2 and d = (G1 - G2)/2.
inline double displaced_window_defect(double omega, double g1, double g2, double epsilon) {
    const double lhs = window(omega - g1, epsilon) - window(omega - g2, epsilon);
    const double gbar = 0.5 * (g1 + g2);
    const double d = 0.5 * (g1 - g2);
    const double rhs = 2.0 * epsilon * window(omega - gbar, epsilon) * window(d, epsilon) *
                       std::sinh(d * (omega - gbar) / (epsilon * epsilon));
    return std::abs(lhs - rhs);
}

inline void write_levels_csv(std::ostream& os, const SyntheticSpectrum& s) {
    os << "index,energy\n";
    os.precision(17);
    for (std::size_t k = 0; k < s.size(); ++k) os << k << ',' << s.energies[k] << '\n';
}

/// Histogram of spacings with the closed-form density at bin centres.
inline void write_spacing_histogram_csv(std::ostream& os, const std::vector<double>& spacings, SpacingLaw law,
                                        double mu, double bin_width, double s_max) {
    const auto nb = static_cast<std::size_t>(std::ceil(s_max / bin_width));
    std::vector<std::size_t> counts(nb, 0);
    for (double s : spacings) {
        const auto k = static_cast<std::size_t>(s / bin_width);
        if (k < nb) ++counts[k];
    }
    os << "s,density,law_density\n";
    os.precision(17);
    const double norm = 1.0 / (static_cast<double>(spacings.size()) * bin_width);
    for (std::size_t k = 0; k < nb; ++k) {
        const double c = (static_cast<double>(k) + 0.5) * bin_width;
        os << c << ',' << static_cast<double>(counts[k]) * norm << ',' << spacing_pdf(law, c, mu) << '\n';
    }
}

} // namespace dephase

#endif // DEPHASE_LEVEL_STATS_HPP
