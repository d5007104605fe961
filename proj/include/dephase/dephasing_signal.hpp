#ifndef DEPHASE_DEPHASING_SIGNAL_HPP
#define DEPHASE_DEPHASING_SIGNAL_HPP

// Gap amplitudes v_(i,j) = conj(c_j) A_ji c_i / Delta_A at gaps G = E_j - E_i,
// the time signal g(t) = sum_a v_a exp(i G_a t) and the dephasing estimates
// built on it.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "dephase/core.hpp"
#include "dephase/lattice_model.hpp"
#include "dephase/spectral.hpp"

namespace dephase {

/// Gap/amplitude pairs sorted by gap. Sets produced by gap_amplitudes are
/// mirror symmetric: gaps[k] == -gaps[N-1-k] and amps[N-1-k] == conj(amps[k]).
struct GapAmplitudeSet {
    std::vector<double> gaps;
    std::vector<cplx> amps;
    double observable_range = 1.0;
    double merge_tol = 0.0;
    double truncation_threshold = 0.0;

    std::size_t size() const { return gaps.size(); }
    bool empty() const { return gaps.empty(); }

    double total_weight() const {
        double s = 0.0;
        for (const auto& v : amps) s += std::norm(v);
        return s;
    }

    /// q_a = |v_a|^2 / sum |v_b|^2.
    std::vector<double> relevances() const {
        const double total = total_weight();
        std::vector<double> q(amps.size());
        for (std::size_t k = 0; k < amps.size(); ++k) q[k] = total > 0.0 ? std::norm(amps[k]) / total : 0.0;
        return q;
    }

    double max_abs_gap() const {
        double m = 0.0;
        for (double g : gaps) m = std::max(m, std::abs(g));
        return m;
    }

    /// Largest violation of the mirror symmetry; 0 for sets built here.
    double symmetry_defect() const {
        const std::size_t n = gaps.size();
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(gaps[k] + gaps[n - 1 - k]));
            worst = std::max(worst, std::abs(std::abs(amps[k]) - std::abs(amps[n - 1 - k])));
        }
        return worst;
    }
};

struct GapOptions {
    double merge_tol = -1.0;            // negative: 1e-10 * spectral range
    double truncation_threshold = 0.0;  // drop |v| below this (pairs together)
    double population_floor = 1e-28;    // |c_k|^2 at or below this counts as unpopulated
};

namespace detail {

struct PositiveGap {
    double gap;
    cplx amp;
};

/// Builds the full mirrored set from merged positive gaps.
inline GapAmplitudeSet mirror(const std::vector<PositiveGap>& pos, double range, double merge_tol,
                              double threshold) {
    GapAmplitudeSet out;
    out.observable_range = range;
    out.merge_tol = merge_tol;
    out.truncation_threshold = threshold;
    out.gaps.reserve(2 * pos.size());
    out.amps.reserve(2 * pos.size());
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
        out.gaps.push_back(-it->gap);
        out.amps.push_back(std::conj(it->amp));
    }
    for (const auto& p : pos) {
        out.gaps.push_back(p.gap);
        out.amps.push_back(p.amp);
    }
    return out;
}

/// Merges gaps closer than merge_tol (chained), drops zero gaps and amplitudes
/// below the threshold. Input is sorted by gap.
inline std::vector<PositiveGap> merge_positive(const std::vector<PositiveGap>& sorted, double merge_tol,
                                               double threshold) {
    std::vector<PositiveGap> merged;
    std::size_t k = 0;
    while (k < sorted.size()) {
        std::size_t e = k + 1;
        while (e < sorted.size() && sorted[e].gap - sorted[e - 1].gap <= merge_tol) ++e;
        cplx v{0.0, 0.0};
        double g = 0.0;
        for (std::size_t j = k; j < e; ++j) {
            v += sorted[j].amp;
            g += sorted[j].gap;
        }
        g /= static_cast<double>(e - k);
        if (g > merge_tol && std::abs(v) > 0.0 && std::abs(v) >= threshold) merged.push_back({g, v});
        k = e;
    }
    return merged;
}

} // namespace detail

/// Enumerates every pair of populated levels with a non-zero amplitude.
inline GapAmplitudeSet gap_amplitudes(const Populations& pop, const OperatorMatrix& a, GapOptions opt = {}) {
    if (!a.hermitian) throw ContractViolation("observable must be Hermitian");
    if (a.dim() != pop.dim()) throw ArgumentError("observable and spectrum dimensions differ");
    const double range = observable_range(a);
    const double scale = std::max(1.0, a.entries.cwiseAbs().maxCoeff());
    if (!(range > 1e-12 * scale))
        throw DegenerateObservable("observable has a single eigenvalue (range 0); the time signal is undefined");
    const double merge_tol = opt.merge_tol < 0.0 ? default_degeneracy_tol(pop.basis) : opt.merge_tol;

    std::vector<Eigen::Index> support;
    for (Eigen::Index k = 0; k < pop.dim(); ++k)
        if (std::norm(pop.c(k)) > opt.population_floor) support.push_back(k);
    const auto p = static_cast<Eigen::Index>(support.size());

    // Observable restricted to the populated eigenvectors.
    MatrixXc w(pop.dim(), p);
    Eigen::VectorXcd c(p);
    Eigen::VectorXd e(p);
    for (Eigen::Index k = 0; k < p; ++k) {
        w.col(k) = pop.basis.vectors.col(support[static_cast<std::size_t>(k)]);
        c(k) = pop.c(support[static_cast<std::size_t>(k)]);
        e(k) = pop.basis.energies(support[static_cast<std::size_t>(k)]);
    }
    MatrixXc aeb;
    if (a.is_real() && w.imag().cwiseAbs().maxCoeff() == 0.0) {
        const Eigen::MatrixXd wr = w.real();
        const Eigen::MatrixXd aw = a.entries.real() * wr;
        aeb = (wr.transpose() * aw).cast<cplx>();
    } else {
        const MatrixXc aw = a.entries * w;
        aeb = w.adjoint() * aw;
    }

    std::vector<detail::PositiveGap> pos;
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) {
            const cplx v = std::conj(c(j)) * aeb(j, i) * c(i) / range;
            if (std::abs(v) == 0.0) continue;
            pos.push_back({e(j) - e(i), v});
        }
    }
    // Stable sort keeps pair order for equal gaps, so the merge is deterministic.
    std::stable_sort(pos.begin(), pos.end(),
                     [](const detail::PositiveGap& x, const detail::PositiveGap& y) { return x.gap < y.gap; });
    return detail::mirror(detail::merge_positive(pos, merge_tol, opt.truncation_threshold), range, merge_tol,
                          opt.truncation_threshold);
}

/// Keeps only amplitudes with |v| >= threshold.
inline GapAmplitudeSet truncate(const GapAmplitudeSet& gas, double threshold) {
    GapAmplitudeSet out = gas;
    out.gaps.clear();
    out.amps.clear();
    out.truncation_threshold = std::max(threshold, gas.truncation_threshold);
    const std::size_t n = gas.size();
    for (std::size_t k = 0; k < n; ++k) {
        // Decide on the non-negative member of each mirror pair so both go together.
        const std::size_t rep = gas.gaps[k] >= 0.0 ? k : n - 1 - k;
        if (std::abs(gas.amps[rep]) >= threshold) {
            out.gaps.push_back(gas.gaps[k]);
            out.amps.push_back(gas.amps[k]);
        }
    }
    return out;
}

/// g(t) on a uniform axis. Phasors advance by exact per-gap rotations and are
/// re-anchored from exp() every 256 steps.
inline SignalGrid time_signal(const GapAmplitudeSet& gas, const UniformAxis& t_axis) {
    SignalGrid out(t_axis);
    const std::size_t nt = t_axis.size();
    constexpr std::size_t kAnchor = 256;
    for (std::size_t a = 0; a < gas.size(); ++a) {
        const double g = gas.gaps[a];
        const cplx v = gas.amps[a];
        const cplx rot = std::polar(1.0, g * t_axis.step());
        cplx z{};
        for (std::size_t k = 0; k < nt; ++k) {
            if (k % kAnchor == 0)
                z = v * std::polar(1.0, g * t_axis[k]);
            else
                z *= rot;
            out.values[k] += z;
        }
    }
    return out;
}

/// g(t) at arbitrary times by direct summation.
inline std::vector<cplx> time_signal_at(const GapAmplitudeSet& gas, const std::vector<double>& times) {
    std::vector<cplx> out(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        cplx s{};
        for (std::size_t a = 0; a < gas.size(); ++a) s += gas.amps[a] * std::polar(1.0, gas.gaps[a] * times[k]);
        out[k] = s;
    }
    return out;
}

/// Direct evolution: (<psi(t)|A|psi(t)> - Tr(A omega)) / Delta_A with
/// omega = sum_k |c_k|^2 |E_k><E_k|. Independent of the gap enumeration.
inline double oracle_evolution(const Populations& pop, const OperatorMatrix& a, double t) {
    const double range = observable_range(a);
    if (!(range > 0.0)) throw DegenerateObservable("observable has range 0");
    const Eigen::Index d = pop.dim();
    Eigen::VectorXcd ct(d);
    for (Eigen::Index k = 0; k < d; ++k) ct(k) = pop.c(k) * std::polar(1.0, -pop.basis.energies(k) * t);
    const Eigen::VectorXcd psi_t = pop.basis.vectors * ct;
    const double expect = psi_t.dot(a.entries * psi_t).real();
    double eq = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        const double w = std::norm(pop.c(k));
        if (w == 0.0) continue;
        const auto col = pop.basis.vectors.col(k);
        eq += w * col.dot(a.entries * col).real();
    }
    return (expect - eq) / range;
}

/// <|g|^2>_inf = sum |v_a|^2 for a merged (non-degenerate) gap set.
inline double infinite_time_fluctuation(const GapAmplitudeSet& gas) { return gas.total_weight(); }

/// (1/T) int_0^T |g(t)|^2 dt by the trapezoid rule with the given step.
inline double finite_time_average(const GapAmplitudeSet& gas, double horizon, double step) {
    if (!(horizon > 0.0)) throw ArgumentError("averaging horizon must be positive");
    const auto axis = UniformAxis::covering(0.0, horizon, step);
    const auto sig = time_signal(gas, axis);
    std::vector<double> mod2(sig.size());
    for (std::size_t k = 0; k < sig.size(); ++k) mod2[k] = std::norm(sig.values[k]);
    return trapezoid(mod2, axis.step()) / horizon;
}

struct ShortBound {
    double lhs = 0.0; // sum |v|^2
    double rhs = 0.0; // 1/d_eff
    bool holds = true;
};

inline ShortBound short_bound_check(const GapAmplitudeSet& gas, double d_eff) {
    if (!(d_eff >= 1.0)) throw ArgumentError("effective dimension must be at least 1");
    ShortBound r{gas.total_weight(), 1.0 / d_eff, true};
    r.holds = r.lhs <= r.rhs * (1.0 + 1e-9);
    return r;
}

struct GapMoments {
    double mean = 0.0;
    double dispersion = 0.0;
};

/// Relevance-weighted mean and standard deviation of the gaps.
inline GapMoments gap_moments(const GapAmplitudeSet& gas) {
    if (gas.empty()) throw NoDynamics("gap set is empty: the time signal has no dynamics");
    const double total = gas.total_weight();
    if (!(total > 0.0)) throw NoDynamics("all gap amplitudes vanish");
    double mu = 0.0;
    for (std::size_t k = 0; k < gas.size(); ++k) mu += std::norm(gas.amps[k]) * gas.gaps[k];
    mu /= total;
    double var = 0.0;
    for (std::size_t k = 0; k < gas.size(); ++k) var += std::norm(gas.amps[k]) * (gas.gaps[k] - mu) * (gas.gaps[k] - mu);
    return {mu, std::sqrt(var / total)};
}

/// sigma_G. The mean gap must vanish by mirror symmetry.
inline double gap_dispersion(const GapAmplitudeSet& gas) {
    const auto m = gap_moments(gas);
    if (std::abs(m.mean) > 1e-9)
        throw ContractViolation("mean gap " + std::to_string(m.mean) + " is not zero; gap set is not symmetric");
    return m.dispersion;
}

/// T_eq ~ pi / sigma_G.
inline double equilibration_time(double sigma_g) {
    if (!(sigma_g > 0.0)) throw InfiniteTimeSignal("zero gap dispersion: the signal never dephases");
    return kPi / sigma_g;
}

struct IdentityCheck {
    double lhs = 0.0; // |g(0)|^2 - sum |v|^2
    double rhs = 0.0; // 2 sum_{a<b} |v_a||v_b| cos(theta_a - theta_b)
};

/// Evaluates the pair sum as 2 sum_b Re(conj(v_b) * sum_{a<b} v_a) with a running prefix.
inline IdentityCheck dephasing_identity_check(const GapAmplitudeSet& gas) {
    if (gas.empty()) throw NoDynamics("gap set is empty");
    cplx total{};
    double sq = 0.0;
    for (const auto& v : gas.amps) {
        total += v;
        sq += std::norm(v);
    }
    cplx prefix{};
    double pair = 0.0;
    for (const auto& v : gas.amps) {
        pair += (std::conj(v) * prefix).real();
        prefix += v;
    }
    return {std::norm(total) - sq, 2.0 * pair};
}

/// Rotated amplitudes v_a exp(i G_a t).
inline std::vector<cplx> phase_cloud(const GapAmplitudeSet& gas, double t) {
    std::vector<cplx> out(gas.size());
    for (std::size_t k = 0; k < gas.size(); ++k) out[k] = gas.amps[k] * std::polar(1.0, gas.gaps[k] * t);
    return out;
}

/// First sampled time with |g(t)|^2 < factor * fluctuation. The factor 2 default
/// is a diagnostic choice, not a derived threshold.
inline std::optional<double> first_equilibrated_time(const SignalGrid& g, double fluctuation, double factor = 2.0) {
    for (std::size_t k = 0; k < g.size(); ++k)
        if (std::norm(g.values[k]) < factor * fluctuation) return g.axis[k];
    return std::nullopt;
}

inline void write_gaps_csv(std::ostream& os, const GapAmplitudeSet& gas) {
    os << "gap,re_v,im_v,relevance\n";
    os.precision(17);
    const auto q = gas.relevances();
    for (std::size_t k = 0; k < gas.size(); ++k)
        os << gas.gaps[k] << ',' << gas.amps[k].real() << ',' << gas.amps[k].imag() << ',' << q[k] << '\n';
}

inline void write_signal_csv(std::ostream& os, const SignalGrid& g) {
    os << "t,re_g,abs_g2\n";
    os.precision(17);
    for (std::size_t k = 0; k < g.size(); ++k)
        os << g.axis[k] << ',' << g.values[k].real() << ',' << std::norm(g.values[k]) << '\n';
}

inline void write_phase_cloud_csv(std::ostream& os, const std::vector<cplx>& pts) {
    os << "re,im\n";
    os.precision(17);
    for (const auto& z : pts) os << z.real() << ',' << z.imag() << '\n';
}

} // namespace dephase

#endif // DEPHASE_DEPHASING_SIGNAL_HPP
