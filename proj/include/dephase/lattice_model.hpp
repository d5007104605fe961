#ifndef DEPHASE_LATTICE_MODEL_HPP
#define DEPHASE_LATTICE_MODEL_HPP

// Spin-1/2 chain operators in the computational basis. Site k is bit (n-1-k)
// of the basis index (site 0 is the leftmost tensor factor) and a clear bit is
// spin up, S^z = +1/2. Spin operators are S = sigma / 2.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dephase/core.hpp"

namespace dephase {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

enum class Boundary { open, periodic };
enum class Axis { x, y, z };

inline std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

inline Boundary parse_boundary(const std::string& s) {
    if (s == "open") return Boundary::open;
    if (s == "periodic") return Boundary::periodic;
    throw ArgumentError("boundary must be 'open' or 'periodic', got '" + s + "'");
}

inline Axis parse_axis(const std::string& s) {
    if (s == "x") return Axis::x;
    if (s == "y") return Axis::y;
    if (s == "z") return Axis::z;
    throw ArgumentError("axis must be x, y or z, got '" + s + "'");
}

/// H = J sum_i [S^x_i S^x_{i+1} + S^y_i S^y_{i+1} + delta S^z_i S^z_{i+1}]
///   + J2 sum_i S^z_i S^z_{i+2} + hz sum_i S^z_i
/// J is the energy unit; j2 and hz are absolute couplings in units of J.
struct HamiltonianSpec {
    int n_sites = 2;
    double J = 1.0;
    double delta = 0.0;
    double j2 = 0.0;
    double hz = 0.0;
    Boundary boundary = Boundary::open;

    void validate() const {
        if (n_sites < 2) throw ArgumentError("n_sites must be at least 2");
        if (n_sites > 30) throw ResourceError("n_sites above 30 cannot be represented densely");
        for (double c : {J, delta, j2, hz})
            if (!std::isfinite(c)) throw ArgumentError("couplings must be finite");
    }

    std::string describe() const {
        return "n_sites=" + std::to_string(n_sites) + " J=" + std::to_string(J) +
               " delta=" + std::to_string(delta) + " j2=" + std::to_string(j2) +
               " hz=" + std::to_string(hz) + " boundary=" + to_string(boundary);
    }
};

/// Dense operator. `known_range` carries a_max - a_min when the constructor
/// knows it exactly, which spares a full eigensolve downstream.
struct OperatorMatrix {
    MatrixXc entries;
    bool hermitian = false;
    std::optional<double> known_range;

    Eigen::Index dim() const { return entries.rows(); }

    /// max |M - M^dagger| / max |M| (0 for the zero matrix).
    double hermiticity_defect() const {
        const double scale = entries.cwiseAbs().maxCoeff();
        if (scale == 0.0) return 0.0;
        return (entries - entries.adjoint()).cwiseAbs().maxCoeff() / scale;
    }
    bool is_real() const { return entries.imag().cwiseAbs().maxCoeff() == 0.0; }
};

struct StateVector {
    VectorXc amplitudes;

    Eigen::Index dim() const { return amplitudes.size(); }
    void validate() const {
        if (std::abs(amplitudes.squaredNorm() - 1.0) > 1e-12)
            throw ArgumentError("state vector is not normalized");
    }
};

struct InteractionGraph {
    int n_vertices = 0;
    std::vector<std::pair<int, int>> edges; // i < j, sorted, unique
};

/// One term h_u of the Hamiltonian restricted to the sites it acts on.
struct LocalTerm {
    std::vector<int> sites;
    MatrixXc matrix; // 2^|sites| square, sites in the listed order
};

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{4} << 30; // 4 GiB

namespace detail {

inline std::size_t dense_bytes(int n_sites) {
    const std::size_t dim = std::size_t{1} << n_sites;
    return dim * dim * sizeof(cplx);
}

inline void check_budget(int n_sites, std::size_t budget) {
    if (n_sites > 30) throw ResourceError("n_sites above 30 cannot be represented densely");
    const std::size_t need = dense_bytes(n_sites);
    if (need > budget)
        throw ResourceError("dense operator for n_sites=" + std::to_string(n_sites) + " needs " +
                            std::to_string(need) + " bytes, budget is " + std::to_string(budget) +
                            " bytes");
}

using PauliString = std::vector<std::pair<int, Axis>>;

/// M += coeff * prod_k S^{axis_k}_{site_k}, with S = sigma/2.
inline void add_spin_product(MatrixXc& m, int n, cplx coeff, const PauliString& ops) {
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::uint64_t flip = 0;
    for (auto [site, ax] : ops)
        if (ax != Axis::z) flip ^= std::uint64_t{1} << (n - 1 - site);
    const double spin = std::pow(0.5, static_cast<double>(ops.size()));
    for (std::uint64_t col = 0; col < dim; ++col) {
        cplx amp = coeff * spin;
        for (auto [site, ax] : ops) {
            const bool down = (col >> (n - 1 - site)) & 1u;
            if (ax == Axis::z) {
                if (down) amp = -amp;
            } else if (ax == Axis::y) {
                amp *= down ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
            }
        }
        m(static_cast<Eigen::Index>(col ^ flip), static_cast<Eigen::Index>(col)) += amp;
    }
}

struct CouplingTerm {
    int a;
    int b;
    bool next_nearest;
};

/// Two-site couplings respecting the boundary; periodic duplicates are kept
/// (they are genuine repeated terms of H when n is small).
inline std::vector<CouplingTerm> coupling_terms(const HamiltonianSpec& spec) {
    std::vector<CouplingTerm> out;
    const int n = spec.n_sites;
    for (int i = 0; i < n; ++i) {
        for (int r : {1, 2}) {
            int j = i + r;
            if (j >= n) {
                if (spec.boundary == Boundary::open) continue;
                j %= n;
            }
            if (j == i) continue;
            out.push_back({i, j, r == 2});
        }
    }
    return out;
}

} // namespace detail

inline OperatorMatrix build_hamiltonian(const HamiltonianSpec& spec,
                                        std::size_t memory_budget = kDefaultMemoryBudget) {
    spec.validate();
    detail::check_budget(spec.n_sites, memory_budget);
    const int n = spec.n_sites;
    const Eigen::Index dim = Eigen::Index{1} << n;
    OperatorMatrix h{MatrixXc::Zero(dim, dim), true, std::nullopt};
    for (const auto& t : detail::coupling_terms(spec)) {
        if (t.next_nearest) {
            if (spec.j2 != 0.0)
                detail::add_spin_product(h.entries, n, spec.j2, {{t.a, Axis::z}, {t.b, Axis::z}});
            continue;
        }
        if (spec.J == 0.0) continue;
        detail::add_spin_product(h.entries, n, spec.J, {{t.a, Axis::x}, {t.b, Axis::x}});
        detail::add_spin_product(h.entries, n, spec.J, {{t.a, Axis::y}, {t.b, Axis::y}});
        if (spec.delta != 0.0)
            detail::add_spin_product(h.entries, n, spec.J * spec.delta, {{t.a, Axis::z}, {t.b, Axis::z}});
    }
    if (spec.hz != 0.0)
        for (int i = 0; i < n; ++i) detail::add_spin_product(h.entries, n, spec.hz, {{i, Axis::z}});
    // S^y S^y products are real, so H is real symmetric; clear signed zeros.
    h.entries = h.entries.real().cast<cplx>();
    return h;
}

/// Terms h_u with their supports: one per coupling and one per field site.
inline std::vector<LocalTerm> local_terms(const HamiltonianSpec& spec) {
    spec.validate();
    std::vector<LocalTerm> out;
    for (const auto& t : detail::coupling_terms(spec)) {
        MatrixXc m = MatrixXc::Zero(4, 4);
        if (t.next_nearest) {
            detail::add_spin_product(m, 2, spec.j2, {{0, Axis::z}, {1, Axis::z}});
        } else {
            detail::add_spin_product(m, 2, spec.J, {{0, Axis::x}, {1, Axis::x}});
            detail::add_spin_product(m, 2, spec.J, {{0, Axis::y}, {1, Axis::y}});
            detail::add_spin_product(m, 2, spec.J * spec.delta, {{0, Axis::z}, {1, Axis::z}});
        }
        out.push_back({{t.a, t.b}, std::move(m)});
    }
    if (spec.hz != 0.0) {
        for (int i = 0; i < spec.n_sites; ++i) {
            MatrixXc m = MatrixXc::Zero(2, 2);
            detail::add_spin_product(m, 1, spec.hz, {{0, Axis::z}});
            out.push_back({{i}, std::move(m)});
        }
    }
    return out;
}

/// max_u ||h_u|| (operator norm) over the terms of H.
inline double max_local_term_norm(const HamiltonianSpec& spec) {
    double best = 0.0;
    for (const auto& t : local_terms(spec)) {
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(t.matrix, Eigen::EigenvaluesOnly);
        best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    return best;
}

/// M^x = (1/n) sum_i S^x_i; spectrum spans [-1/2, 1/2].
inline OperatorMatrix build_magnetization_x(int n_sites,
                                            std::size_t memory_budget = kDefaultMemoryBudget) {
    if (n_sites < 1) throw ArgumentError("n_sites must be at least 1");
    detail::check_budget(n_sites, memory_budget);
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    OperatorMatrix m{MatrixXc::Zero(dim, dim), true, 1.0};
    for (int i = 0; i < n_sites; ++i)
        detail::add_spin_product(m.entries, n_sites, 1.0 / n_sites, {{i, Axis::x}});
    return m;
}

/// S^axis on one site, identity elsewhere. Operator norm 1/2, range 1.
inline OperatorMatrix build_local_observable(int site, Axis axis, int n_sites,
                                             std::size_t memory_budget = kDefaultMemoryBudget) {
    if (n_sites < 1) throw ArgumentError("n_sites must be at least 1");
    if (site < 0 || site >= n_sites)
        throw ArgumentError("site " + std::to_string(site) + " out of range for " +
                            std::to_string(n_sites) + " sites");
    detail::check_budget(n_sites, memory_budget);
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    OperatorMatrix m{MatrixXc::Zero(dim, dim), true, 1.0};
    detail::add_spin_product(m.entries, n_sites, 1.0, {{site, axis}});
    return m;
}

/// Product state with every spin along +x: ((|up> + |down>)/sqrt 2)^{\otimes n}.
inline StateVector build_x_polarized_state(int n_sites) {
    if (n_sites < 1) throw ArgumentError("n_sites must be at least 1");
    if (n_sites > 30) throw ResourceError("n_sites above 30 cannot be represented densely");
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    return {VectorXc::Constant(dim, cplx(std::pow(2.0, -0.5 * n_sites), 0.0))};
}

/// Computational basis state |b>.
inline StateVector basis_state(int n_sites, std::uint64_t index) {
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    if (index >= static_cast<std::uint64_t>(dim)) throw ArgumentError("basis index out of range");
    VectorXc v = VectorXc::Zero(dim);
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return {v};
}

/// One-site cyclic shift T: site k -> site k+1 (mod n).
inline OperatorMatrix build_translation(int n_sites) {
    const std::uint64_t dim = std::uint64_t{1} << n_sites;
    OperatorMatrix t{MatrixXc::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)),
                     false, std::nullopt};
    for (std::uint64_t b = 0; b < dim; ++b) {
        // bit (n-1-k) holds site k; moving site k to k+1 is a right rotation.
        const std::uint64_t rotated = ((b >> 1) | ((b & 1u) << (n_sites - 1))) & (dim - 1);
        t.entries(static_cast<Eigen::Index>(rotated), static_cast<Eigen::Index>(b)) = 1.0;
    }
    return t;
}

inline InteractionGraph interaction_graph(const HamiltonianSpec& spec) {
    spec.validate();
    std::set<std::pair<int, int>> edges;
    for (const auto& t : detail::coupling_terms(spec)) {
        const bool active = t.next_nearest ? spec.j2 != 0.0 : spec.J != 0.0;
        if (!active) continue;
        edges.insert({std::min(t.a, t.b), std::max(t.a, t.b)});
    }
    return {spec.n_sites, {edges.begin(), edges.end()}};
}

} // namespace dephase

#endif // DEPHASE_LATTICE_MODEL_HPP
