#ifndef DEPHASE_COARSE_GRAIN_HPP
#define DEPHASE_COARSE_GRAIN_HPP

// Gaussian coarse-graining of the frequency signal
//   g~_eps(w) = sum_a v_a h_eps(w - G_a),   h_eps(w) = exp(-w^2 / 2 eps^2) / eps,
// its time-domain image g_eps(t) = exp(-eps^2 t^2 / 2) g(t), the coarse-grained
// dispersion and the smooth-plus-noise ensemble check.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

#include "dephase/core.hpp"
#include "dephase/dephasing_signal.hpp"
#include "dephase/random.hpp"

namespace dephase {

inline double window(double omega, double epsilon) {
    return std::exp(-0.5 * omega * omega / (epsilon * epsilon)) / epsilon;
}

struct CoarseGrainConfig {
    double epsilon = 0.4;
    UniformAxis omega_grid;
    double truncation_threshold = 0.0;

    /// Grid over +-(max|G| + 6 eps) with step eps/10.
    static CoarseGrainConfig for_gaps(const GapAmplitudeSet& gas, double epsilon, double threshold = 0.0) {
        if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
        const double reach = gas.max_abs_gap() + 6.0 * epsilon;
        return {epsilon, UniformAxis::covering(-reach, reach, epsilon / 10.0), threshold};
    }

    /// Throws unless the grid step is <= eps/5 and every gap lies 5 eps inside the grid.
    void validate_for(const GapAmplitudeSet& gas) const {
        if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
        if (omega_grid.step() > epsilon / 5.0 * (1.0 + 1e-12))
            throw GridCoverageError("frequency grid step " + std::to_string(omega_grid.step()) +
                                    " exceeds eps/5 = " + std::to_string(epsilon / 5.0));
        std::ostringstream missing;
        std::size_t count = 0;
        for (double g : gas.gaps) {
            if (g - 5.0 * epsilon < omega_grid.front() || g + 5.0 * epsilon > omega_grid.back()) {
                if (count < 10) missing << (count ? ", " : "") << g;
                ++count;
            }
        }
        if (count)
            throw GridCoverageError(std::to_string(count) + " gaps not covered by the frequency grid: " +
                                    missing.str() + (count > 10 ? ", ..." : ""));
    }
};

namespace detail {

/// Adds weight * exp(-(x_k - center)^2 / 2 sigma^2) to out[k] for all grid
/// points within kGaussianCutoff sigma. Walks outward from the nearest sample
/// with a two-term multiplicative recurrence, so no exp() per point.
template <class T>
void add_gaussian(std::vector<T>& out, const UniformAxis& grid, double center, double sigma, T weight) {
    const double h = grid.step();
    const double kc_real = std::round((center - grid.front()) / h);
    const long long last = static_cast<long long>(grid.size()) - 1;
    const long long reach = static_cast<long long>(std::ceil(kGaussianCutoff * sigma / h));
    const long long kc = static_cast<long long>(kc_real);
    if (kc + reach < 0 || kc - reach > last) return;
    const double inv2s2 = 0.5 / (sigma * sigma);
    const double q = std::exp(-2.0 * h * h * inv2s2);

    const long long start = std::clamp(kc, 0LL, last);
    const double x0 = grid[static_cast<std::size_t>(start)] - center;
    const double e0 = std::exp(-x0 * x0 * inv2s2);
    const long long hi = std::min(last, kc + reach);
    const long long lo = std::max(0LL, kc - reach);

    out[static_cast<std::size_t>(start)] += weight * e0;
    double e = e0;
    double r = std::exp(-(2.0 * x0 * h + h * h) * inv2s2);
    for (long long k = start + 1; k <= hi; ++k) {
        e *= r;
        r *= q;
        out[static_cast<std::size_t>(k)] += weight * e;
    }
    e = e0;
    r = std::exp(-(-2.0 * x0 * h + h * h) * inv2s2);
    for (long long k = start - 1; k >= lo; --k) {
        e *= r;
        r *= q;
        out[static_cast<std::size_t>(k)] += weight * e;
    }
}

inline constexpr int kGaussTransformOrder = 20;
inline constexpr std::size_t kDirectPairLimit = 2048;

/// F(x_a) = sum_b w_b exp(-(x_a - x_b)^2 / delta) for sorted x, by direct
/// summation over neighbours within the Gaussian cutoff.
inline std::vector<cplx> gauss_field_direct(const std::vector<double>& x, const std::vector<cplx>& w, double delta) {
    const double reach = std::sqrt(delta) * 6.5;
    std::vector<cplx> f(x.size());
    std::size_t lo = 0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        while (lo < x.size() && x[lo] < x[a] - reach) ++lo;
        cplx s{};
        for (std::size_t b = lo; b < x.size() && x[b] <= x[a] + reach; ++b) {
            const double d = x[a] - x[b];
            s += w[b] * std::exp(-d * d / delta);
        }
        f[a] = s;
    }
    return f;
}

/// The same field by a one-dimensional fast Gauss transform: Hermite
/// expansions about source box centres, converted to Taylor series about
/// target box centres. Boxes are half a kernel width wide, so 20 terms
/// reach double precision.
inline std::vector<cplx> gauss_field_fast(const std::vector<double>& x, const std::vector<cplx>& w, double delta) {
    constexpr int p = kGaussTransformOrder;
    constexpr double box = 0.5;
    constexpr double cutoff = 6.5 + box;
    const double scale = 1.0 / std::sqrt(delta);
    const std::size_t n = x.size();
    const double x0 = x.front() * scale;

    // Occupied boxes in ascending order; x is sorted so boxes are contiguous runs.
    struct Box {
        long long index;
        double center;
        std::size_t begin, end;
        std::array<cplx, p> moments{};
    };
    std::vector<Box> boxes;
    for (std::size_t k = 0; k < n; ++k) {
        const auto idx = static_cast<long long>(std::floor((x[k] * scale - x0) / box));
        if (boxes.empty() || boxes.back().index != idx)
            boxes.push_back({idx, x0 + (static_cast<double>(idx) + 0.5) * box, k, k + 1, {}});
        else
            boxes.back().end = k + 1;
    }

    std::array<double, p> inv_fact{};
    inv_fact[0] = 1.0;
    for (int k = 1; k < p; ++k) inv_fact[k] = inv_fact[k - 1] / k;

    for (auto& b : boxes) {
        for (std::size_t k = b.begin; k < b.end; ++k) {
            const double u = x[k] * scale - b.center;
            double pw = 1.0;
            for (int m = 0; m < p; ++m) {
                b.moments[m] += w[k] * (pw * inv_fact[m]);
                pw *= u;
            }
        }
    }

    std::vector<cplx> f(n);
    const auto span = static_cast<long long>(std::ceil(cutoff / box));
    std::array<double, 2 * p> herm{};
    std::size_t first = 0;
    for (const auto& t : boxes) {
        while (boxes[first].index < t.index - span) ++first;
        std::array<cplx, p> taylor{};
        for (std::size_t s = first; s < boxes.size() && boxes[s].index <= t.index + span; ++s) {
            const auto& src = boxes[s];
            const double y = t.center - src.center;
            // Hermite functions h_m(y) = H_m(y) exp(-y^2), m < 2p.
            herm[0] = std::exp(-y * y);
            herm[1] = 2.0 * y * herm[0];
            for (int m = 1; m + 1 < 2 * p; ++m) herm[m + 1] = 2.0 * y * herm[m] - 2.0 * m * herm[m - 1];
            for (int k = 0; k < p; ++k) {
                cplx acc{};
                for (int m = 0; m < p; ++m) acc += src.moments[m] * herm[m + k];
                taylor[k] += acc;
            }
        }
        for (int k = 0; k < p; ++k) taylor[k] *= ((k % 2) ? -1.0 : 1.0) * inv_fact[k];
        for (std::size_t k = t.begin; k < t.end; ++k) {
            const double u = x[k] * scale - t.center;
            cplx acc{};
            for (int m = p - 1; m >= 0; --m) acc = acc * u + taylor[m];
            f[k] = acc;
        }
    }
    return f;
}

inline std::vector<cplx> gauss_field(const std::vector<double>& x, const std::vector<cplx>& w, double delta) {
    if (x.empty()) return {};
    return x.size() <= kDirectPairLimit ? gauss_field_direct(x, w, delta) : gauss_field_fast(x, w, delta);
}

} // namespace detail

/// sum_{a,b} v_a conj(v_b) exp(-(G_a - G_b)^2 / 4 eps^2). Gaps must be sorted.
inline double gaussian_pair_sum(const GapAmplitudeSet& gas, double epsilon) {
    std::vector<cplx> vc(gas.size());
    for (std::size_t k = 0; k < gas.size(); ++k) vc[k] = std::conj(gas.amps[k]);
    const auto f = detail::gauss_field(gas.gaps, vc, 4.0 * epsilon * epsilon);
    cplx s{};
    for (std::size_t k = 0; k < gas.size(); ++k) s += gas.amps[k] * f[k];
    return s.real();
}

/// g~_eps sampled on the configured grid.
inline SignalGrid cg_frequency_signal(const GapAmplitudeSet& gas, const CoarseGrainConfig& cfg) {
    cfg.validate_for(gas);
    SignalGrid out(cfg.omega_grid);
    const double inv_eps = 1.0 / cfg.epsilon;
    for (std::size_t k = 0; k < gas.size(); ++k) {
        if (std::abs(gas.amps[k]) < cfg.truncation_threshold) continue;
        detail::add_gaussian(out.values, cfg.omega_grid, gas.gaps[k], cfg.epsilon, gas.amps[k] * inv_eps);
    }
    return out;
}

/// g_eps(t) = exp(-eps^2 t^2 / 2) g(t).
inline SignalGrid cg_time_signal(const SignalGrid& g, double epsilon) {
    SignalGrid out = g;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double t = g.axis[k];
        out.values[k] *= std::exp(-0.5 * epsilon * epsilon * t * t);
    }
    return out;
}

/// (1/sqrt(2 pi)) int g~(w) exp(i w t) dw by the trapezoid rule, at each t.
inline std::vector<cplx> inverse_transform(const SignalGrid& g_tilde, const std::vector<double>& times) {
    std::vector<cplx> out(times.size());
    const auto& ax = g_tilde.axis;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        const cplx rot = std::polar(1.0, ax.step() * t);
        cplx z = std::polar(1.0, ax.front() * t);
        cplx s{};
        for (std::size_t k = 0; k < ax.size(); ++k) {
            if (k % 256 == 0) z = std::polar(1.0, ax[k] * t);
            const double wgt = (k == 0 || k + 1 == ax.size()) ? 0.5 : 1.0;
            s += wgt * g_tilde.values[k] * z;
            z *= rot;
        }
        out[j] = s * ax.step() / kSqrt2Pi;
    }
    return out;
}

/// max_t |F^-1[g~_eps](t) - exp(-eps^2 t^2 / 2) g(t)|.
inline double inverse_ft_consistency(const GapAmplitudeSet& gas, const CoarseGrainConfig& cfg,
                                     const UniformAxis& t_axis) {
    if (gas.empty()) return 0.0;
    const auto gt = cg_frequency_signal(gas, cfg);
    const auto times = t_axis.values();
    const auto numeric = inverse_transform(gt, times);
    const auto exact = time_signal_at(gas, times);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double damp = std::exp(-0.5 * cfg.epsilon * cfg.epsilon * times[k] * times[k]);
        worst = std::max(worst, std::abs(numeric[k] - damp * exact[k]));
    }
    return worst;
}

struct CoarseDispersion {
    double mean = 0.0;       // mu~_w
    double dispersion = 0.0; // Delta w_eps
    double norm = 0.0;       // sum_{a,b} v_a conj(v_b) exp(-(G_a - G_b)^2 / 4 eps^2)
};

/// Closed-form moments of |g~_eps|^2:
///   Delta w_eps^2 = sum_{a,b} v_a conj(v_b) e^{-(G_a-G_b)^2/4eps^2} [(G_a+G_b)^2/4 + eps^2/2]
///                 / sum_{a,b} v_a conj(v_b) e^{-(G_a-G_b)^2/4eps^2}
inline CoarseDispersion cg_moments(const GapAmplitudeSet& gas, double epsilon) {
    if (gas.empty()) throw NoDynamics("gap set is empty");
    if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
    const std::size_t n = gas.size();
    const double delta = 4.0 * epsilon * epsilon;
    std::vector<cplx> wv(n), wvg(n);
    for (std::size_t k = 0; k < n; ++k) {
        wv[k] = std::conj(gas.amps[k]);
        wvg[k] = std::conj(gas.amps[k]) * gas.gaps[k];
    }
    const auto fv = detail::gauss_field(gas.gaps, wv, delta);
    const auto fvg = detail::gauss_field(gas.gaps, wvg, delta);
    cplx s00{}, s10{}, s20{}, s11{};
    for (std::size_t k = 0; k < n; ++k) {
        const cplx v = gas.amps[k];
        const double g = gas.gaps[k];
        s00 += v * fv[k];
        s10 += v * g * fv[k];
        s20 += v * g * g * fv[k];
        s11 += v * g * fvg[k];
    }
    const double den = s00.real();
    if (!(den > 0.0)) throw NoDynamics("coarse-grained frequency signal vanishes");
    const double num = 0.5 * (s20.real() + s11.real()) + 0.5 * epsilon * epsilon * den;
    return {s10.real() / den, std::sqrt(std::max(num / den, 0.0)), den};
}

/// Delta w_eps; the mean must vanish for a symmetric gap set.
inline double cg_dispersion(const GapAmplitudeSet& gas, double epsilon) {
    const auto m = cg_moments(gas, epsilon);
    if (std::abs(m.mean) > 1e-9)
        throw ContractViolation("coarse-grained mean frequency " + std::to_string(m.mean) + " is not zero");
    return m.dispersion;
}

/// rho_eps(w) = sum_a N_eps(w - G_a).
inline SignalGrid cg_gap_density(const std::vector<double>& gaps, double epsilon, const UniformAxis& grid) {
    if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
    SignalGrid out(grid);
    const cplx amp(1.0 / (kSqrt2Pi * epsilon), 0.0);
    for (double g : gaps) detail::add_gaussian(out.values, grid, g, epsilon, amp);
    return out;
}

struct EpsilonChoice {
    double epsilon = 0.0;
    double lower = 0.0; // median spacing of consecutive relevant gaps
    double upper = 0.0; // 1 / K
    bool valid = false; // upper / lower >= 100
    std::size_t relevant_gaps = 0;
};

/// Geometric mean of the median relevant-gap spacing and 1/K. Gaps with
/// relevance <= relevance_threshold are ignored.
inline EpsilonChoice select_epsilon(const std::vector<double>& gaps, const std::vector<double>& relevances,
                                    double k_estimate, double relevance_threshold = 0.0) {
    if (gaps.size() != relevances.size()) throw ArgumentError("gaps and relevances differ in length");
    if (!(k_estimate > 0.0)) throw ArgumentError("K estimate must be positive");
    std::vector<double> kept;
    for (std::size_t k = 0; k < gaps.size(); ++k)
        if (relevances[k] > relevance_threshold) kept.push_back(gaps[k]);
    std::sort(kept.begin(), kept.end());
    std::vector<double> spacing;
    for (std::size_t k = 1; k < kept.size(); ++k)
        if (kept[k] > kept[k - 1]) spacing.push_back(kept[k] - kept[k - 1]);
    if (spacing.empty()) throw NoValidEpsilon("fewer than two distinct relevant gaps");
    auto mid = spacing.begin() + static_cast<std::ptrdiff_t>(spacing.size() / 2);
    std::nth_element(spacing.begin(), mid, spacing.end());
    double median = *mid;
    if (spacing.size() % 2 == 0) median = 0.5 * (median + *std::max_element(spacing.begin(), mid));

    EpsilonChoice c;
    c.lower = median;
    c.upper = 1.0 / k_estimate;
    c.relevant_gaps = kept.size();
    if (c.lower >= c.upper)
        throw NoValidEpsilon("relevant-gap spacing " + std::to_string(c.lower) + " is not below 1/K = " +
                             std::to_string(c.upper));
    c.epsilon = std::sqrt(c.lower * c.upper);
    c.valid = c.upper / c.lower >= 100.0;
    return c;
}

/// Smooth amplitude function plus independent complex Gaussian noise of
/// standard deviation gamma(w).
struct SmoothAnsatz {
    std::function<cplx(double)> v_smooth;
    std::function<double(double)> gamma;
    double K = 0.0;
    std::uint64_t seed = 0;

    /// Largest finite-difference slope of |v|, arg v and gamma on [lo, hi]
    /// (phase differences are wrapped to (-pi, pi]).
    double measured_lipschitz(double lo, double hi, std::size_t samples = 4001) const {
        const auto ax = UniformAxis::covering(lo, hi, (hi - lo) / static_cast<double>(samples - 1));
        double worst = 0.0;
        for (std::size_t k = 1; k < ax.size(); ++k) {
            const cplx a = v_smooth(ax[k - 1]), b = v_smooth(ax[k]);
            worst = std::max(worst, std::abs(std::abs(b) - std::abs(a)) / ax.step());
            if (std::abs(a) > 0.0 && std::abs(b) > 0.0)
                worst = std::max(worst, std::abs(std::arg(b / a)) / ax.step());
            worst = std::max(worst, std::abs(gamma(ax[k]) - gamma(ax[k - 1])) / ax.step());
        }
        return worst;
    }

    void validate(double lo, double hi) const {
        if (!v_smooth || !gamma) throw ArgumentError("ansatz functions are not set");
        const double k = measured_lipschitz(lo, hi);
        if (k > K * (1.0 + 1e-6) + 1e-12)
            throw ArgumentError("ansatz K = " + std::to_string(K) + " is below the measured slope " +
                                std::to_string(k));
    }
};

/// Fitted once with calibrate_c1 and frozen: 12001 Poisson levels on
/// [-3, 3] (seed 7), three smooth ansatze, eps in {0.02, 0.05, 0.1, 0.2};
/// the largest fitted value was 0.4925.
inline constexpr double kResult2C1 = 0.5;

struct Result2Report {
    double epsilon = 0.0;
    double c1 = kResult2C1;
    double m = 2.0;
    std::size_t trials = 0;
    std::size_t points = 0;     // interior grid points per trial
    double pass_fraction = 0.0; // share of (trial, point) samples within the bound
    double median_deviation = 0.0;
    double q90_deviation = 0.0;
    double max_deviation = 0.0;
    double max_bound_ratio = 0.0;
};

namespace detail {

inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    const auto k = static_cast<std::size_t>(std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

} // namespace detail

/// Draws `trials` noise realisations (trial k uses stream split(k) of the
/// ansatz seed) and compares |g~_eps(w) - sqrt(2 pi) v(w) rho_eps(w)| with
///   rho_eps (c1 K eps + pi^{1/4} m gamma(w) / sqrt(eps rho_eps))
/// on grid points at least 6 eps inside the gap range.
inline Result2Report result2_ensemble_check(const SmoothAnsatz& ansatz, const std::vector<double>& gaps,
                                            double epsilon, std::size_t trials, double c1 = kResult2C1,
                                            double m = 2.0) {
    if (gaps.size() < 2) throw ArgumentError("need at least two gaps");
    if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
    std::vector<double> g = gaps;
    std::sort(g.begin(), g.end());
    const double lo = g.front(), hi = g.back();
    if (!(hi - lo > 12.0 * epsilon)) throw ArgumentError("gap range too narrow for eps");
    ansatz.validate(lo, hi);
    const auto grid = UniformAxis::covering(lo + 6.0 * epsilon, hi - 6.0 * epsilon, epsilon / 10.0);

    const auto rho = cg_gap_density(g, epsilon, grid);
    GapAmplitudeSet smooth;
    smooth.gaps = g;
    smooth.amps.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) smooth.amps[k] = ansatz.v_smooth(g[k]);
    std::vector<cplx> base(grid.size());
    for (std::size_t k = 0; k < g.size(); ++k) detail::add_gaussian(base, grid, g[k], epsilon, smooth.amps[k] / epsilon);

    std::vector<double> bound(grid.size()), target_residual(grid.size());
    std::vector<cplx> target(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double r = rho.values[j].real();
        target[j] = kSqrt2Pi * ansatz.v_smooth(grid[j]) * r;
        bound[j] = r * (c1 * ansatz.K * epsilon) +
                   (r > 0.0 ? std::pow(kPi, 0.25) * m * ansatz.gamma(grid[j]) * std::sqrt(r / epsilon) : 0.0);
    }

    Result2Report rep;
    rep.epsilon = epsilon;
    rep.c1 = c1;
    rep.m = m;
    rep.trials = trials;
    rep.points = grid.size();
    std::vector<double> devs;
    devs.reserve(trials * grid.size());
    std::size_t pass = 0;
    const RandomStream root(ansatz.seed);
    std::vector<double> gamma_at(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) gamma_at[k] = ansatz.gamma(g[k]);
    for (std::size_t t = 0; t < std::max<std::size_t>(trials, 1); ++t) {
        RandomStream rs = root.split(t);
        std::vector<cplx> sig = base;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double re = rs.normal(), im = rs.normal();
            if (gamma_at[k] == 0.0) continue;
            const cplx dv = gamma_at[k] / std::numbers::sqrt2 * cplx(re, im);
            detail::add_gaussian(sig, grid, g[k], epsilon, dv / epsilon);
        }
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double d = std::abs(sig[j] - target[j]);
            devs.push_back(d);
            if (d <= bound[j]) ++pass;
            if (bound[j] > 0.0) rep.max_bound_ratio = std::max(rep.max_bound_ratio, d / bound[j]);
            rep.max_deviation = std::max(rep.max_deviation, d);
        }
        if (trials == 0) break;
    }
    rep.pass_fraction = devs.empty() ? 0.0 : static_cast<double>(pass) / static_cast<double>(devs.size());
    rep.median_deviation = detail::quantile(devs, 0.5);
    rep.q90_deviation = detail::quantile(devs, 0.9);
    return rep;
}

/// Smallest c1 for which the noiseless deviation satisfies the bound at every
/// interior grid point: max |g~_eps - sqrt(2 pi) v rho_eps| / (rho_eps K eps).
inline double calibrate_c1(const SmoothAnsatz& ansatz, const std::vector<double>& gaps, double epsilon) {
    SmoothAnsatz quiet = ansatz;
    quiet.gamma = [](double) { return 0.0; };
    if (!(ansatz.K > 0.0)) throw ArgumentError("calibration needs K > 0");
    std::vector<double> g = gaps;
    std::sort(g.begin(), g.end());
    const auto grid = UniformAxis::covering(g.front() + 6.0 * epsilon, g.back() - 6.0 * epsilon, epsilon / 10.0);
    const auto rho = cg_gap_density(g, epsilon, grid);
    std::vector<cplx> sig(grid.size());
    for (double x : g) detail::add_gaussian(sig, grid, x, epsilon, quiet.v_smooth(x) / epsilon);
    double c1 = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double r = rho.values[j].real();
        if (r <= 0.0) continue;
        const double d = std::abs(sig[j] - kSqrt2Pi * quiet.v_smooth(grid[j]) * r);
        c1 = std::max(c1, d / (r * ansatz.K * epsilon));
    }
    return c1;
}

inline void write_frequency_csv(std::ostream& os, const SignalGrid& g) {
    os << "omega,re_g,abs_g2\n";
    os.precision(17);
    for (std::size_t k = 0; k < g.size(); ++k)
        os << g.axis[k] << ',' << g.values[k].real() << ',' << std::norm(g.values[k]) << '\n';
}

} // namespace dephase

#endif // DEPHASE_COARSE_GRAIN_HPP
