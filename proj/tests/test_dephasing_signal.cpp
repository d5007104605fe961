#include <gtest/gtest.h>

#include <sstream>

#include "dephase/dephase.hpp"
#include "xxz_fixture.hpp"

using namespace dephase;

namespace {

// Independent reference: Eigen's eigensolver, explicit propagation and the
// dephased state obtained by projecting onto near-degenerate eigenspaces.
struct Reference {
    Eigen::VectorXd e;
    MatrixXc v;
    VectorXc psi0;
    MatrixXc a;
    double eq = 0.0;

    Reference(const OperatorMatrix& h, const StateVector& psi, const OperatorMatrix& obs) {
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(h.entries);
        e = es.eigenvalues();
        v = es.eigenvectors();
        psi0 = psi.amplitudes;
        a = obs.entries;
        const VectorXc c = v.adjoint() * psi0;
        const double tol = 1e-9 * (e(e.size() - 1) - e(0));
        Eigen::Index s = 0;
        while (s < e.size()) {
            Eigen::Index t = s + 1;
            while (t < e.size() && e(t) - e(s) <= tol) ++t;
            const VectorXc proj = v.middleCols(s, t - s) * c.segment(s, t - s);
            eq += proj.dot(a * proj).real();
            s = t;
        }
    }

    double g(double t) const {
        const VectorXc c = v.adjoint() * psi0;
        VectorXc ct(c.size());
        for (Eigen::Index k = 0; k < c.size(); ++k) ct(k) = c(k) * std::polar(1.0, -e(k) * t);
        const VectorXc psi = v * ct;
        return psi.dot(a * psi).real() - eq;
    }
};

GapAmplitudeSet pair_set(double gap, cplx v) {
    GapAmplitudeSet s;
    s.gaps = {-gap, gap};
    s.amps = {std::conj(v), v};
    return s;
}

} // namespace

TEST(GapAmplitudes, TwoSiteHandComputed) {
    // |up up> (0.325), |down down> (-0.075) and the triplet (0.375) carry the
    // dynamics: v = 1/8 at gaps 0.05 and 0.45.
    HamiltonianSpec s;
    s.n_sites = 2;
    s.delta = 0.5;
    s.hz = 0.2;
    const auto pop = populations(diagonalize(build_hamiltonian(s)), build_x_polarized_state(2));
    const auto gas = gap_amplitudes(pop, build_magnetization_x(2));
    ASSERT_EQ(gas.size(), 4u);
    EXPECT_NEAR(gas.gaps[2], 0.05, 1e-14);
    EXPECT_NEAR(gas.gaps[3], 0.45, 1e-14);
    EXPECT_NEAR(std::abs(gas.amps[2]), 0.125, 1e-14);
    EXPECT_NEAR(std::abs(gas.amps[3]), 0.125, 1e-14);
    const double sigma = gap_dispersion(gas);
    EXPECT_NEAR(sigma, std::sqrt(0.5 * (0.05 * 0.05 + 0.45 * 0.45)), 1e-14);
    EXPECT_NEAR(equilibration_time(sigma), kPi / std::sqrt(0.1025), 1e-12);
}

TEST(GapAmplitudes, MirrorSymmetryAndNormalization) {
    for (int n : {3, 5, 8})
        for (auto b : {Boundary::open, Boundary::periodic}) {
            const auto& r = fixture::xxz(n, b);
            const auto& g = r.gas;
            const std::size_t N = g.size();
            ASSERT_EQ(N % 2, 0u);
            for (std::size_t k = 0; k < N; ++k) {
                EXPECT_EQ(g.gaps[k], -g.gaps[N - 1 - k]);
                EXPECT_EQ(g.amps[k], std::conj(g.amps[N - 1 - k]));
                if (k) EXPECT_LE(g.gaps[k - 1], g.gaps[k]);
            }
            const auto q = g.relevances();
            EXPECT_NEAR(std::accumulate(q.begin(), q.end(), 0.0), 1.0, 1e-12);
            EXPECT_NEAR(gap_moments(g).mean, 0.0, 1e-9);
        }
}

TEST(GapAmplitudes, Deterministic) {
    const auto a = fixture::make_run(7, Boundary::open);
    const auto b = fixture::make_run(7, Boundary::open);
    ASSERT_EQ(a->gas.size(), b->gas.size());
    for (std::size_t k = 0; k < a->gas.size(); ++k) {
        EXPECT_EQ(a->gas.gaps[k], b->gas.gaps[k]);
        EXPECT_EQ(a->gas.amps[k], b->gas.amps[k]);
    }
}

TEST(GapAmplitudes, Errors) {
    const auto& r = fixture::xxz(3);
    OperatorMatrix id{MatrixXc::Identity(8, 8), true, std::nullopt};
    EXPECT_THROW(gap_amplitudes(r.pop, id), DegenerateObservable);
    OperatorMatrix wrong = build_magnetization_x(2);
    EXPECT_THROW(gap_amplitudes(r.pop, wrong), ArgumentError);
}

TEST(GapAmplitudes, TruncationDropsMirrorPairsTogether) {
    const auto& g = fixture::xxz(6).gas;
    const auto t = truncate(g, 1e-3);
    EXPECT_LT(t.size(), g.size());
    EXPECT_EQ(t.size() % 2, 0u);
    EXPECT_EQ(t.symmetry_defect(), 0.0);
    for (const auto& v : t.amps) EXPECT_GE(std::abs(v), 1e-3);
    GapOptions opt;
    opt.truncation_threshold = 1e-3;
    const auto direct = gap_amplitudes(fixture::xxz(6).pop, fixture::xxz(6).mx, opt);
    EXPECT_EQ(direct.size(), t.size());
}

TEST(TimeSignal, SinglePairClosedForm) {
    const auto g = pair_set(0.7, std::polar(0.3, 0.4));
    const auto ax = UniformAxis::from_step(0.0, 50.0, 0.05);
    const auto sig = time_signal(g, ax);
    for (std::size_t k = 0; k < ax.size(); ++k) {
        EXPECT_NEAR(sig.values[k].real(), 0.6 * std::cos(0.7 * ax[k] + 0.4), 1e-13);
        EXPECT_NEAR(sig.values[k].imag(), 0.0, 1e-13);
    }
}

TEST(TimeSignal, GridMatchesDirectSummation) {
    const auto& g = fixture::xxz(8).gas;
    const auto ax = UniformAxis::from_step(0.0, 100.0, 0.05);
    const auto grid = time_signal(g, ax);
    const auto direct = time_signal_at(g, ax.values());
    double worst = 0.0;
    for (std::size_t k = 0; k < ax.size(); ++k) worst = std::max(worst, std::abs(grid.values[k] - direct[k]));
    EXPECT_LT(worst, 1e-11);
}

TEST(TimeSignal, RealForHermitianObservable) {
    for (int n : {4, 7}) {
        const auto sig = time_signal(fixture::xxz(n).gas, UniformAxis::from_step(0.0, 100.0, 0.05));
        for (const auto& z : sig.values) EXPECT_LE(std::abs(z.imag()), 1e-10);
    }
}

TEST(TimeSignal, GapSumMatchesIndependentOracle) {
    RandomStream rs(2024);
    for (int n = 2; n <= 8; ++n)
        for (auto b : {Boundary::open, Boundary::periodic}) {
            const auto& r = fixture::xxz(n, b);
            const Reference ref(r.h, r.psi0, r.mx);
            std::vector<double> times(20);
            for (auto& t : times) t = 100.0 * rs.uniform();
            const auto g = time_signal_at(r.gas, times);
            for (std::size_t k = 0; k < times.size(); ++k) {
                EXPECT_NEAR(g[k].real(), ref.g(times[k]), 1e-9) << "n=" << n << " t=" << times[k];
                EXPECT_NEAR(g[k].real(), oracle_evolution(r.pop, r.mx, times[k]), 1e-9);
            }
        }
}

TEST(TimeSignal, LocalObservableOracle) {
    const auto& r = fixture::xxz(6);
    const auto a = build_local_observable(2, Axis::z, 6);
    const auto gas = gap_amplitudes(r.pop, a);
    const Reference ref(r.h, r.psi0, a);
    for (double t : {0.0, 1.3, 17.0, 88.8}) EXPECT_NEAR(time_signal_at(gas, {t})[0].real(), ref.g(t), 1e-9);
}

TEST(TimeSignal, EigenstateInitialConditionIsFlat) {
    const auto& r = fixture::xxz(5);
    const auto sp = diagonalize(r.h);
    const auto pop = populations(sp, StateVector{sp.vectors.col(7)});
    const auto gas = gap_amplitudes(pop, r.mx);
    EXPECT_TRUE(gas.empty());
    const auto sig = time_signal(gas, UniformAxis::from_step(0.0, 10.0, 0.5));
    for (const auto& z : sig.values) EXPECT_EQ(z, cplx(0.0, 0.0));
    EXPECT_THROW(gap_dispersion(gas), NoDynamics);
}

TEST(Fluctuations, FiniteTimeAverageConverges) {
    const auto& g = fixture::xxz(6).gas;
    const double inf = infinite_time_fluctuation(g);
    const double e3 = std::abs(finite_time_average(g, 1e3, 0.05) - inf);
    const double e4 = std::abs(finite_time_average(g, 1e4, 0.05) - inf);
    EXPECT_LT(e4, e3);
    EXPECT_LT(e4, 0.05 * inf);
}

TEST(Fluctuations, ShortBound) {
    for (int n = 2; n <= 10; ++n)
        for (auto b : {Boundary::open, Boundary::periodic}) {
            const auto& r = fixture::xxz(n, b);
            const auto sb = short_bound_check(r.gas, effective_dimension(r.pop));
            EXPECT_TRUE(sb.holds) << "n=" << n << " lhs=" << sb.lhs << " rhs=" << sb.rhs;
        }
}

TEST(Fluctuations, ShortBoundTightForSinglePair) {
    // Two equally populated levels with |A_12| = Delta_A / 2: sum |v|^2 = 1/8 <= 1/2.
    const auto g = pair_set(1.0, 0.25);
    const auto sb = short_bound_check(g, 2.0);
    EXPECT_DOUBLE_EQ(sb.lhs, 0.125);
    EXPECT_DOUBLE_EQ(sb.rhs, 0.5);
    EXPECT_TRUE(sb.holds);
    EXPECT_FALSE(short_bound_check(pair_set(1.0, 0.6), 2.0).holds);
}

TEST(Dispersion, Errors) {
    EXPECT_THROW(gap_dispersion(GapAmplitudeSet{}), NoDynamics);
    EXPECT_THROW(equilibration_time(0.0), InfiniteTimeSignal);
    GapAmplitudeSet lopsided;
    lopsided.gaps = {1.0};
    lopsided.amps = {1.0};
    EXPECT_THROW(gap_dispersion(lopsided), ContractViolation);
}

TEST(DephasingIdentity, MatchesNaivePairSum) {
    for (int n : {3, 6, 8}) {
        const auto& g = fixture::xxz(n).gas;
        const auto id = dephasing_identity_check(g);
        double naive = 0.0;
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = a + 1; b < g.size(); ++b)
                naive += 2.0 * std::abs(g.amps[a]) * std::abs(g.amps[b]) * std::cos(std::arg(g.amps[a]) - std::arg(g.amps[b]));
        EXPECT_NEAR(id.rhs, naive, 1e-12);
        EXPECT_NEAR(id.lhs, id.rhs, 1e-10);
    }
}

TEST(PhaseCloud, SumsToSignal) {
    const auto& g = fixture::xxz(6).gas;
    for (double t : {0.0, 4.0, 20.0}) {
        const auto pts = phase_cloud(g, t);
        cplx s{};
        for (const auto& z : pts) s += z;
        EXPECT_NEAR(std::abs(s - time_signal_at(g, {t})[0]), 0.0, 1e-12);
    }
    const auto at0 = phase_cloud(g, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(at0[k], g.amps[k]);
}

TEST(PhaseCloud, HalfTurnNegates) {
    GapAmplitudeSet g;
    g.gaps = {2.0};
    g.amps = {cplx(0.3, 0.1)};
    const auto pts = phase_cloud(g, kPi / 2.0);
    EXPECT_NEAR(std::abs(pts[0] + g.amps[0]), 0.0, 1e-15);
}

TEST(RecurrenceHeight, TenSiteChainRecurs) {
    // Open chain; the periodic chain peaks earlier (Jt ~ 45) and also stays below 10x.
    const auto& g = fixture::xxz(10).gas;
    const double fluct = infinite_time_fluctuation(g);
    const auto sig = time_signal(g, UniformAxis::from_step(60.0, 100.0, 0.05));
    double peak = 0.0;
    for (const auto& z : sig.values) peak = std::max(peak, std::norm(z));
    EXPECT_GT(peak, 10.0 * fluct);
}

TEST(Recurrence, SignalRevivesAfterDephasing) {
    // Measured shape of the open n=10 signal: dephased near Jt = 20, revived after Jt = 60.
    const auto& g = fixture::xxz(10).gas;
    const auto early = time_signal(g, UniformAxis::from_step(19.0, 21.0, 0.05));
    const auto late = time_signal(g, UniformAxis::from_step(60.0, 100.0, 0.05));
    double low = 1.0, peak = 0.0;
    for (const auto& z : early.values) low = std::min(low, std::norm(z));
    for (const auto& z : late.values) peak = std::max(peak, std::norm(z));
    EXPECT_GT(peak, 100.0 * low);
}

TEST(FirstEquilibratedTime, Diagnostic) {
    const auto& g = fixture::xxz(8).gas;
    const auto sig = time_signal(g, UniformAxis::from_step(0.0, 100.0, 0.05));
    const auto t = first_equilibrated_time(sig, infinite_time_fluctuation(g));
    ASSERT_TRUE(t.has_value());
    EXPECT_GT(*t, 0.0);
}

TEST(Export, CsvHeaders) {
    const auto g = pair_set(1.0, 0.2);
    std::ostringstream a, b, c;
    write_gaps_csv(a, g);
    write_signal_csv(b, time_signal(g, UniformAxis::from_step(0.0, 1.0, 0.5)));
    write_phase_cloud_csv(c, phase_cloud(g, 1.0));
    EXPECT_EQ(a.str().rfind("gap,re_v,im_v,relevance\n", 0), 0u);
    EXPECT_EQ(b.str().rfind("t,re_g,abs_g2\n", 0), 0u);
    EXPECT_EQ(c.str().rfind("re,im\n", 0), 0u);
}
