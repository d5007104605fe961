#ifndef DEPHASE_SPECTRAL_HPP
#define DEPHASE_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include <lapacke.h>

#include "dephase/core.hpp"
#include "dephase/lattice_model.hpp"

namespace dephase {

/// Ascending energies with the matching unitary eigenvector matrix (column k <-> energies[k]).
struct Spectrum {
    Eigen::VectorXd energies;
    MatrixXc vectors;

    Eigen::Index dim() const { return energies.size(); }
    double range() const { return dim() == 0 ? 0.0 : energies(dim() - 1) - energies(0); }
};

/// Dense Hermitian eigensolve through LAPACK's divide-and-conquer drivers.
/// Real symmetric input is routed to dsyevd, which is about four times cheaper.
inline Spectrum diagonalize(const OperatorMatrix& h) {
    if (!h.hermitian) throw ContractViolation("diagonalize requires an operator flagged Hermitian");
    if (h.entries.rows() != h.entries.cols() || h.entries.rows() == 0)
        throw ContractViolation("diagonalize requires a non-empty square matrix");
    if (h.hermiticity_defect() > 1e-12)
        throw ContractViolation("operator flagged Hermitian is not Hermitian to 1e-12");

    const auto n = static_cast<lapack_int>(h.entries.rows());
    Spectrum out;
    out.energies.resize(n);
    if (h.is_real()) {
        Eigen::MatrixXd a = h.entries.real();
        const lapack_int info =
            LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, out.energies.data());
        if (info != 0) throw ContractViolation("dsyevd failed with info=" + std::to_string(info));
        out.vectors = a.cast<cplx>();
    } else {
        out.vectors = h.entries;
        const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n,
                                               out.energies.data());
        if (info != 0) throw ContractViolation("zheevd failed with info=" + std::to_string(info));
    }
    return out;
}

/// Eigenvalues only.
inline Eigen::VectorXd eigenvalues(const OperatorMatrix& a) {
    const auto n = static_cast<lapack_int>(a.entries.rows());
    Eigen::VectorXd w(n);
    if (a.is_real()) {
        Eigen::MatrixXd m = a.entries.real();
        if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, m.data(), n, w.data()) != 0)
            throw ContractViolation("dsyevd failed");
    } else {
        MatrixXc m = a.entries;
        if (LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, reinterpret_cast<lapack_complex_double*>(m.data()), n,
                           w.data()) != 0)
            throw ContractViolation("zheevd failed");
    }
    return w;
}

/// a_max - a_min of a Hermitian operator.
inline double observable_range(const OperatorMatrix& a) {
    if (a.known_range) return *a.known_range;
    const Eigen::VectorXd w = eigenvalues(a);
    return w(w.size() - 1) - w(0);
}

/// max |H V - V diag(E)|.
inline double eigen_residual(const OperatorMatrix& h, const Spectrum& s) {
    return (h.entries * s.vectors - s.vectors * s.energies.cast<cplx>().asDiagonal()).cwiseAbs().maxCoeff();
}

/// max |V^dagger V - 1|.
inline double orthonormality_defect(const Spectrum& s) {
    const auto n = s.vectors.cols();
    return (s.vectors.adjoint() * s.vectors - MatrixXc::Identity(n, n)).cwiseAbs().maxCoeff();
}

/// Overlaps c_k = <E_k|psi> in an eigenbasis rotated so that psi touches
/// exactly one vector per (near-)degenerate eigenspace.
struct Populations {
    Eigen::VectorXcd c;
    Spectrum basis; // rotated eigenbasis; energies of a merged group share its first value
    std::vector<std::vector<Eigen::Index>> merged_groups; // groups of size > 1, original indices

    Eigen::Index dim() const { return c.size(); }
    Eigen::VectorXd weights() const { return c.cwiseAbs2(); }
};

inline double default_degeneracy_tol(const Spectrum& s) { return 1e-10 * std::max(s.range(), 1e-300); }

/// Degenerate groups are chains whose energies stay within `degeneracy_tol`
/// of the group's lowest member. A negative tolerance selects the default.
inline Populations populations(const Spectrum& spec, const StateVector& psi0, double degeneracy_tol = -1.0) {
    if (psi0.dim() != spec.dim()) throw ArgumentError("state and spectrum dimensions differ");
    const double norm2 = psi0.amplitudes.squaredNorm();
    if (norm2 == 0.0) throw ArgumentError("initial state is the zero vector");
    if (std::abs(norm2 - 1.0) > 1e-10) throw ArgumentError("initial state is not normalized");
    if (degeneracy_tol < 0.0) degeneracy_tol = default_degeneracy_tol(spec);

    Populations out;
    out.basis = spec;
    const Eigen::Index d = spec.dim();
    out.c = spec.vectors.adjoint() * psi0.amplitudes;

    Eigen::Index start = 0;
    while (start < d) {
        Eigen::Index end = start + 1;
        while (end < d && spec.energies(end) - spec.energies(start) <= degeneracy_tol) ++end;
        const Eigen::Index m = end - start;
        if (m > 1) {
            std::vector<Eigen::Index> group(static_cast<std::size_t>(m));
            for (Eigen::Index k = 0; k < m; ++k) group[static_cast<std::size_t>(k)] = start + k;
            out.merged_groups.push_back(group);

            const Eigen::VectorXcd a = out.c.segment(start, m);
            const double na = a.norm();
            if (na <= 1e-13) {
                // Roundoff-level overlap: the state has no weight in this eigenspace.
                out.c.segment(start, m).setZero();
            } else {
                // Householder reflector whose first column is a/|a|.
                Eigen::HouseholderQR<MatrixXc> qr(a);
                MatrixXc q = qr.householderQ() * MatrixXc::Identity(m, m);
                MatrixXc block = spec.vectors.middleCols(start, m) * q;
                // Fix the phase so the surviving overlap is real and positive.
                const cplx ov = block.col(0).dot(psi0.amplitudes);
                block.col(0) *= ov / std::abs(ov);
                out.basis.vectors.middleCols(start, m) = block;
                out.c.segment(start, m).setZero();
                out.c(start) = block.col(0).dot(psi0.amplitudes);
            }
            for (Eigen::Index k = start; k < end; ++k) out.basis.energies(k) = spec.energies(start);
        }
        start = end;
    }
    return out;
}

/// d_eff = 1 / sum |c_k|^4.
inline double effective_dimension(const Populations& pop) {
    const double s = pop.c.cwiseAbs2().cwiseAbs2().sum();
    return 1.0 / s;
}

struct EnergyMoments {
    double mean = 0.0;
    double stddev = 0.0;
};

/// mu = <psi|H|psi>, sigma^2 = ||(H - mu) psi||^2.
inline EnergyMoments energy_moments(const StateVector& psi0, const OperatorMatrix& h) {
    if (psi0.dim() != h.dim()) throw ArgumentError("state and operator dimensions differ");
    const Eigen::VectorXcd hpsi = h.entries * psi0.amplitudes;
    const double mu = psi0.amplitudes.dot(hpsi).real();
    const double var = (hpsi - mu * psi0.amplitudes).squaredNorm();
    return {mu, std::sqrt(std::max(var, 0.0))};
}

/// The same moments computed from the populations and energies.
inline EnergyMoments spectral_moments(const Populations& pop) {
    const Eigen::VectorXd w = pop.weights();
    const Eigen::VectorXd& e = pop.basis.energies;
    const double mu = w.dot(e);
    const double var = w.dot((e.array() - mu).square().matrix());
    return {mu, std::sqrt(std::max(var, 0.0))};
}

/// f_eps(E) = sum_i |c_i|^2 N_eps(E - E_i) sampled on a grid.
struct EnergyDensity {
    double epsilon = 0.0;
    UniformAxis grid;
    std::vector<double> values;
    double mean = 0.0;
    double stddev = 0.0;
    bool coverage_warning = false; // grid misses [min E - 5 eps, max E + 5 eps]

    double mass() const { return trapezoid(values, grid.step()); }
};

/// Grid [min E - 6 eps, max E + 6 eps] over populated levels with step eps/10.
inline UniformAxis default_energy_grid(const Populations& pop, double epsilon, double floor = 1e-28) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index k = 0; k < pop.dim(); ++k) {
        if (std::norm(pop.c(k)) <= floor) continue;
        lo = std::min(lo, pop.basis.energies(k));
        hi = std::max(hi, pop.basis.energies(k));
    }
    return UniformAxis::covering(lo - 6.0 * epsilon, hi + 6.0 * epsilon, epsilon / 10.0);
}

inline EnergyDensity energy_density(const Populations& pop, double epsilon, const UniformAxis& grid) {
    if (!(epsilon > 0.0)) throw ArgumentError("energy density width must be positive");
    EnergyDensity out;
    out.epsilon = epsilon;
    out.grid = grid;
    out.values.assign(grid.size(), 0.0);
    const auto m = spectral_moments(pop);
    out.mean = m.mean;
    out.stddev = m.stddev;

    const double reach = kGaussianCutoff * epsilon;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index k = 0; k < pop.dim(); ++k) {
        const double w = std::norm(pop.c(k));
        if (w == 0.0) continue;
        const double e = pop.basis.energies(k);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
        const double first = std::ceil((e - reach - grid.front()) / grid.step());
        const double last = std::floor((e + reach - grid.front()) / grid.step());
        const auto a = static_cast<long long>(std::max(first, 0.0));
        const auto b = static_cast<long long>(std::min(last, static_cast<double>(grid.size()) - 1.0));
        for (long long j = a; j <= b; ++j)
            out.values[static_cast<std::size_t>(j)] += w * gaussian(grid[static_cast<std::size_t>(j)] - e, epsilon);
    }
    out.coverage_warning = grid.front() > lo - 5.0 * epsilon || grid.back() < hi + 5.0 * epsilon;
    return out;
}

inline EnergyDensity energy_density(const Populations& pop, double epsilon) {
    return energy_density(pop, epsilon, default_energy_grid(pop, epsilon));
}

/// Kolmogorov distance sup_E |CDF(f_eps) - CDF(Gaussian(mu_E, sigma_E))| over the grid.
inline double gaussianity_distance(const EnergyDensity& f) {
    if (!(f.stddev > 0.0)) throw DegenerateDensity("energy density has zero width");
    const auto cdf = cumulative_trapezoid(f.values, f.grid.step());
    double worst = 0.0;
    for (std::size_t k = 0; k < cdf.size(); ++k)
        worst = std::max(worst, std::abs(cdf[k] - normal_cdf(f.grid[k], f.mean, f.stddev)));
    return worst;
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
    os << "index,energy\n";
    os.precision(17);
    for (Eigen::Index k = 0; k < s.dim(); ++k) os << k << ',' << s.energies(k) << '\n';
}

inline void write_populations_csv(std::ostream& os, const Populations& p) {
    os << "index,energy,weight,phase\n";
    os.precision(17);
    for (Eigen::Index k = 0; k < p.dim(); ++k)
        os << k << ',' << p.basis.energies(k) << ',' << std::norm(p.c(k)) << ',' << std::arg(p.c(k)) << '\n';
}

} // namespace dephase

#endif // DEPHASE_SPECTRAL_HPP
