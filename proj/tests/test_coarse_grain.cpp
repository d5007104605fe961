#include <gtest/gtest.h>

#include <sstream>

#include "dephase/dephase.hpp"
#include "xxz_fixture.hpp"

using namespace dephase;

namespace {

std::vector<double> real_part(const SignalGrid& g) {
    std::vector<double> r(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) r[k] = g.values[k].real();
    return r;
}

std::vector<double> abs2(const SignalGrid& g) {
    std::vector<double> r(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) r[k] = std::norm(g.values[k]);
    return r;
}

GapAmplitudeSet symmetric_set(const std::vector<double>& positive, const std::vector<cplx>& amps) {
    GapAmplitudeSet s;
    for (std::size_t k = positive.size(); k-- > 0;) {
        s.gaps.push_back(-positive[k]);
        s.amps.push_back(std::conj(amps[k]));
    }
    for (std::size_t k = 0; k < positive.size(); ++k) {
        s.gaps.push_back(positive[k]);
        s.amps.push_back(amps[k]);
    }
    return s;
}

// Second moment of |g~|^2 by quadrature on a fine grid.
double grid_dispersion(const GapAmplitudeSet& g, double eps) {
    auto cfg = CoarseGrainConfig::for_gaps(g, eps);
    cfg.omega_grid = UniformAxis::covering(cfg.omega_grid.front() - 4 * eps, cfg.omega_grid.back() + 4 * eps, eps / 50);
    const auto f = cg_frequency_signal(g, cfg);
    auto p = abs2(f);
    const double den = trapezoid(p, f.axis.step());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] *= f.axis[k] * f.axis[k];
    return std::sqrt(trapezoid(p, f.axis.step()) / den);
}

std::vector<SmoothAnsatz> calibration_ansatze() {
    std::vector<SmoothAnsatz> an(3);
    an[0].v_smooth = [](double w) { return cplx(0.01 * std::exp(-w * w / 2), 0.0); };
    an[1].v_smooth = [](double w) { return 0.01 * std::exp(-w * w / 8) * std::polar(1.0, 0.7 * w); };
    an[2].v_smooth = [](double w) { return cplx(0.01 * (1 + 0.5 * std::cos(2 * w)), 0.0); };
    for (auto& a : an) a.gamma = [](double) { return 0.0; };
    return an;
}

const SyntheticSpectrum& calibration_levels() {
    static const auto sp = generate_spectrum(SpacingLaw::poisson, 5e-4, 12001, 7, -3.0);
    return sp;
}

} // namespace

TEST(Window, ClosedForm) {
    EXPECT_DOUBLE_EQ(window(0.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(window(0.0, 0.25), 4.0);
    EXPECT_NEAR(window(0.3, 0.3), std::exp(-0.5) / 0.3, 1e-15);
    const auto ax = UniformAxis::covering(-8.0, 8.0, 0.01);
    std::vector<double> y(ax.size());
    for (std::size_t k = 0; k < ax.size(); ++k) y[k] = window(ax[k], 0.7);
    EXPECT_NEAR(trapezoid(y, ax.step()), kSqrt2Pi, 1e-12);
}

TEST(Window, SelfConvolution) {
    const double eps = 0.5;
    const auto ax = UniformAxis::covering(-10.0, 10.0, 0.005);
    for (double x : {0.0, 0.3, 1.0, 2.2}) {
        std::vector<double> y(ax.size());
        for (std::size_t k = 0; k < ax.size(); ++k) y[k] = window(ax[k], eps) * window(x - ax[k], eps);
        EXPECT_NEAR(trapezoid(y, ax.step()), 2.0 * kPi * gaussian(x, std::sqrt(2.0) * eps), 1e-12) << x;
    }
}

TEST(GaussField, FastTransformMatchesDirect) {
    RandomStream rs(5);
    for (std::size_t n : {3000u, 20000u}) {
        std::vector<double> x(n);
        std::vector<cplx> w(n);
        for (auto& v : x) v = 6.0 * rs.uniform() - 3.0;
        std::sort(x.begin(), x.end());
        for (auto& v : w) v = cplx(rs.normal(), rs.normal());
        for (double delta : {4e-4, 0.04, 0.64}) {
            const auto a = detail::gauss_field_direct(x, w, delta);
            const auto b = detail::gauss_field_fast(x, w, delta);
            double scale = 0.0, err = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                scale = std::max(scale, std::abs(a[k]));
                err = std::max(err, std::abs(a[k] - b[k]));
            }
            EXPECT_LT(err, 1e-11 * scale) << "n=" << n << " delta=" << delta;
        }
    }
}

TEST(GaussField, DirectMatchesNaiveDoubleSum) {
    const auto& g = fixture::xxz(5).gas;
    for (double eps : {0.01, 0.4}) {
        double naive = 0.0;
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = 0; b < g.size(); ++b) {
                const double d = g.gaps[a] - g.gaps[b];
                naive += (g.amps[a] * std::conj(g.amps[b])).real() * std::exp(-d * d / (4 * eps * eps));
            }
        EXPECT_NEAR(gaussian_pair_sum(g, eps), naive, 1e-14);
    }
}

TEST(FrequencySignal, SinglePairBumps) {
    const auto g = symmetric_set({1.0}, {0.3});
    const auto cfg = CoarseGrainConfig::for_gaps(g, 0.1);
    const auto f = cg_frequency_signal(g, cfg);
    for (double w0 : {-1.0, 1.0}) {
        const auto k = static_cast<std::size_t>(std::llround((w0 - f.axis.front()) / f.axis.step()));
        EXPECT_NEAR(f.axis[k], w0, 1e-12);
        EXPECT_NEAR(f.values[k].real(), 0.3 / 0.1, 1e-12);
    }
    for (std::size_t k = 0; k < f.size(); ++k)
        EXPECT_NEAR(f.values[k].real(), 0.3 * (window(f.axis[k] - 1.0, 0.1) + window(f.axis[k] + 1.0, 0.1)), 1e-12);
}

TEST(FrequencySignal, PeaksAtGapsForSmallEpsilon) {
    const auto g = symmetric_set({0.3, 0.7, 1.1}, {0.2, 0.1, 0.05});
    const double eps = 0.005;
    const auto f = cg_frequency_signal(g, CoarseGrainConfig::for_gaps(g, eps));
    for (double gap : g.gaps) {
        std::size_t best = 0;
        double peak = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k)
            if (std::abs(f.axis[k] - gap) < 0.1 && std::abs(f.values[k]) > peak) {
                peak = std::abs(f.values[k]);
                best = k;
            }
        EXPECT_LE(std::abs(f.axis[best] - gap), f.axis.step());
    }
}

TEST(FrequencySignal, Parseval) {
    for (int n : {4, 7}) {
        const auto& g = fixture::xxz(n).gas;
        for (double eps : {0.05, 0.4}) {
            const auto f = cg_frequency_signal(g, CoarseGrainConfig::for_gaps(g, eps));
            const double lhs = trapezoid(abs2(f), f.axis.step());
            const double rhs = std::sqrt(kPi) / eps * gaussian_pair_sum(g, eps);
            EXPECT_NEAR(lhs, rhs, 1e-4 * rhs) << n << " " << eps;
        }
    }
}

TEST(FrequencySignal, GridCoverageErrors) {
    const auto g = symmetric_set({1.0, 2.0}, {0.1, 0.1});
    CoarseGrainConfig coarse{0.1, UniformAxis::covering(-3.0, 3.0, 0.05), 0.0};
    EXPECT_THROW(cg_frequency_signal(g, coarse), GridCoverageError);
    CoarseGrainConfig narrow{0.1, UniformAxis::covering(-2.2, 2.2, 0.01), 0.0};
    try {
        cg_frequency_signal(g, narrow);
        FAIL();
    } catch (const GridCoverageError& e) {
        EXPECT_NE(std::string(e.what()).find("2 gaps"), std::string::npos);
    }
    EXPECT_THROW(CoarseGrainConfig::for_gaps(g, 0.0), ArgumentError);
}

TEST(TimeSignal, DampingClosedForm) {
    const auto g = symmetric_set({0.5}, {0.25});
    const double eps = 0.4;
    const auto ax = UniformAxis::from_step(0.0, 3.0 / eps, 3.0 / eps / 100.0);
    const auto raw = time_signal(g, ax);
    const auto damped = cg_time_signal(raw, eps);
    EXPECT_EQ(damped.values.front(), raw.values.front());
    EXPECT_NEAR(std::abs(damped.values.back() / raw.values.back()), std::exp(-4.5), 1e-15);
    EXPECT_NEAR(std::exp(-4.5), 0.0111, 1e-4);
}

TEST(TimeSignal, MonotoneDamping) {
    const auto& g = fixture::xxz(6).gas;
    const auto raw = time_signal(g, UniformAxis::from_step(0.0, 100.0, 0.05));
    const auto damped = cg_time_signal(raw, 0.1);
    for (std::size_t k = 1; k < raw.size(); ++k) {
        EXPECT_LE(std::abs(damped.values[k]), std::abs(raw.values[k]));
        if (std::abs(raw.values[k]) > 0.0) EXPECT_LT(std::abs(damped.values[k]), std::abs(raw.values[k]));
    }
}

TEST(InverseTransform, SinglePairAnalytic) {
    const auto g = symmetric_set({0.8}, {cplx(0.2, 0.1)});
    const auto cfg = CoarseGrainConfig::for_gaps(g, 0.3);
    EXPECT_LE(inverse_ft_consistency(g, cfg, UniformAxis::from_step(0.0, 20.0, 0.1)), 1e-6);
    EXPECT_EQ(inverse_ft_consistency(GapAmplitudeSet{}, cfg, UniformAxis::from_step(0.0, 1.0, 0.1)), 0.0);
}

TEST(InverseTransform, TenSiteChain) {
    const auto& g = fixture::xxz(10).gas;
    const auto cfg = CoarseGrainConfig::for_gaps(g, 0.4);
    EXPECT_LE(inverse_ft_consistency(g, cfg, UniformAxis::from_step(0.0, 40.0, 0.05)), 1e-3);
}

TEST(Dispersion, SinglePairClosedForm) {
    const double G = 0.6;
    const auto g = symmetric_set({G}, {0.2});
    for (double eps : {0.05, 0.3, 1.0}) {
        const double x = std::exp(-G * G / (eps * eps));
        const double want = std::sqrt((G * G + 0.5 * eps * eps + 0.5 * eps * eps * x) / (1.0 + x));
        EXPECT_NEAR(cg_dispersion(g, eps), want, 1e-14) << eps;
        EXPECT_NEAR(cg_dispersion(g, eps), grid_dispersion(g, eps), 1e-8 * want) << eps;
    }
    EXPECT_NEAR(cg_dispersion(g, 1e-4), G, 1e-8);
}

TEST(Dispersion, MatchesQuadratureOnChain) {
    const auto& g = fixture::xxz(6).gas;
    for (double eps : {0.02, 0.4}) {
        const double d = cg_dispersion(g, eps);
        EXPECT_NEAR(d, grid_dispersion(g, eps), 1e-6 * d) << eps;
    }
}

TEST(Dispersion, FastPathMatchesDirect) {
    const auto& g = fixture::xxz(8).gas;
    ASSERT_GT(g.size(), detail::kDirectPairLimit);
    for (double eps : {0.01, 0.4}) {
        std::vector<cplx> w(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) w[k] = std::conj(g.amps[k]);
        const double delta = 4 * eps * eps;
        const auto a = detail::gauss_field_direct(g.gaps, w, delta);
        const auto b = detail::gauss_field_fast(g.gaps, w, delta);
        cplx sa{}, sb{};
        for (std::size_t k = 0; k < g.size(); ++k) {
            sa += g.amps[k] * a[k];
            sb += g.amps[k] * b[k];
        }
        EXPECT_NEAR(sa.real(), sb.real(), 1e-12 * std::abs(sa));
    }
}

TEST(Dispersion, SmallEpsilonLimit) {
    const auto g = symmetric_set({0.3, 0.7, 1.1, 1.6}, {0.2, cplx(0.1, 0.05), 0.05, cplx(0.0, 0.02)});
    const double eps = 1e-3 * 0.4;
    const double sigma = gap_dispersion(g);
    EXPECT_LE(std::abs(cg_dispersion(g, eps) - sigma) / sigma, 1e-6);
}

TEST(Dispersion, MeanVanishesOnChains) {
    for (int n : {3, 6, 9})
        for (double eps : {0.01, 0.4}) EXPECT_LE(std::abs(cg_moments(fixture::xxz(n).gas, eps).mean), 1e-9);
}

TEST(Dispersion, ContinuousInEpsilon) {
    const auto& g = fixture::xxz(10).gas;
    for (int k = 0; k < 10; ++k) {
        const double eps = 0.02 * std::pow(20.0, k / 9.0);
        const double a = cg_dispersion(g, eps), b = cg_dispersion(g, 1.01 * eps);
        EXPECT_LE(std::abs(b - a) / a, 0.05) << eps;
    }
}

TEST(Dispersion, Errors) {
    EXPECT_THROW(cg_dispersion(GapAmplitudeSet{}, 0.1), NoDynamics);
    EXPECT_THROW(cg_dispersion(symmetric_set({1.0}, {0.1}), 0.0), ArgumentError);
    GapAmplitudeSet lopsided;
    lopsided.gaps = {1.0};
    lopsided.amps = {0.5};
    EXPECT_THROW(cg_dispersion(lopsided, 0.1), ContractViolation);
}

TEST(GapDensity, Mass) {
    const auto grid = UniformAxis::covering(-3.0, 3.0, 0.005);
    EXPECT_NEAR(trapezoid(real_part(cg_gap_density({0.2}, 0.1, grid)), grid.step()), 1.0, 1e-12);
    EXPECT_NEAR(trapezoid(real_part(cg_gap_density({0.2, 0.2, 0.2, 0.2}, 0.1, grid)), grid.step()), 4.0, 1e-11);
    EXPECT_THROW(cg_gap_density({0.0}, -1.0, grid), ArgumentError);
}

TEST(GapDensity, TenSiteCount) {
    const auto& g = fixture::xxz(10).gas;
    const auto cfg = CoarseGrainConfig::for_gaps(g, 0.05);
    const auto rho = cg_gap_density(g.gaps, 0.05, cfg.omega_grid);
    const double mass = trapezoid(real_part(rho), cfg.omega_grid.step());
    EXPECT_NEAR(mass, static_cast<double>(g.size()), 1e-3 * static_cast<double>(g.size()));
}

TEST(SelectEpsilon, GeometricMean) {
    std::vector<double> gaps(1000), q(1000, 1e-3);
    for (std::size_t k = 0; k < gaps.size(); ++k) gaps[k] = 1e-6 * static_cast<double>(k);
    const auto c = select_epsilon(gaps, q, 1.0);
    EXPECT_NEAR(c.epsilon, 1e-3, 1e-12);
    EXPECT_NEAR(c.lower, 1e-6, 1e-15);
    EXPECT_DOUBLE_EQ(c.upper, 1.0);
    EXPECT_TRUE(c.valid);
    EXPECT_EQ(c.relevant_gaps, 1000u);
}

TEST(SelectEpsilon, WindowEmpty) {
    std::vector<double> gaps{0.0, 0.5, 1.0, 1.5};
    std::vector<double> q(4, 0.25);
    EXPECT_THROW(select_epsilon(gaps, q, 2.0), NoValidEpsilon);
    const auto c = select_epsilon(gaps, q, 1.0 / 20.0);
    EXPECT_FALSE(c.valid);
    EXPECT_THROW(select_epsilon(gaps, {1.0}, 1.0), ArgumentError);
}

TEST(SelectEpsilon, IgnoresIrrelevantGaps) {
    std::vector<double> gaps{0.0, 0.001, 0.002, 1.0, 2.0};
    std::vector<double> q{0.3, 1e-9, 1e-9, 0.3, 0.4};
    EXPECT_NEAR(select_epsilon(gaps, q, 1e-4, 1e-6).lower, 1.0, 1e-15);
}

TEST(Result2, ConstantAmplitudeIsExact) {
    SmoothAnsatz a;
    a.v_smooth = [](double) { return cplx(0.02, -0.01); };
    a.gamma = [](double) { return 0.0; };
    a.K = 0.0;
    const auto rep = result2_ensemble_check(a, calibration_levels().energies, 0.05, 1);
    EXPECT_LE(rep.max_deviation, 1e-6);
}

TEST(Result2, FrozenConstantCoversCalibrationEnsemble) {
    double fitted = 0.0;
    for (auto a : calibration_ansatze()) {
        a.K = a.measured_lipschitz(calibration_levels().energies.front(), calibration_levels().energies.back()) * (1 + 1e-7);
        for (double eps : {0.02, 0.05, 0.1, 0.2}) fitted = std::max(fitted, calibrate_c1(a, calibration_levels().energies, eps));
    }
    EXPECT_LE(fitted, kResult2C1);
    EXPECT_GT(fitted, 0.9 * kResult2C1);
}

TEST(Result2, NoiselessDeviationWithinBound) {
    auto a = calibration_ansatze()[1];
    a.K = 0.7 * (1 + 1e-7);
    const auto rep = result2_ensemble_check(a, calibration_levels().energies, 0.1, 1);
    EXPECT_EQ(rep.pass_fraction, 1.0);
    EXPECT_LE(rep.max_bound_ratio, 1.0);
}

TEST(Result2, FluctuationScaling) {
    auto a = calibration_ansatze()[0];
    a.K = 0.00607;
    a.seed = 11;
    auto median = [&](double gamma, double eps) {
        a.gamma = [gamma](double) { return gamma; };
        return result2_ensemble_check(a, calibration_levels().energies, eps, 100).median_deviation;
    };
    const double base = median(0.02, 0.01);
    EXPECT_NEAR(median(0.02, 0.04) / base, 0.5, 0.5 * 0.25);
    EXPECT_NEAR(median(0.01, 0.01) / base, 0.5, 0.5 * 0.20);
}

TEST(Result2, PassFractionNearConfidence) {
    auto a = calibration_ansatze()[0];
    a.K = 0.00607;
    a.seed = 3;
    a.gamma = [](double) { return 0.01; };
    const auto rep = result2_ensemble_check(a, calibration_levels().energies, 0.02, 100);
    // A complex Gaussian exceeds m = 2 standard deviations with probability e^{-4}.
    EXPECT_GT(rep.pass_fraction, 1.0 - 2.0 * std::exp(-4.0));
}

TEST(Result2, Deterministic) {
    auto a = calibration_ansatze()[2];
    a.K = 0.011;
    a.seed = 9;
    a.gamma = [](double w) { return 0.005 * (1 + 0.1 * std::sin(w)); };
    const auto r1 = result2_ensemble_check(a, calibration_levels().energies, 0.05, 10);
    const auto r2 = result2_ensemble_check(a, calibration_levels().energies, 0.05, 10);
    EXPECT_EQ(r1.median_deviation, r2.median_deviation);
    EXPECT_EQ(r1.max_deviation, r2.max_deviation);
}

TEST(Result2, Errors) {
    auto a = calibration_ansatze()[1];
    a.K = 0.1; // below the measured phase slope 0.7
    EXPECT_THROW(result2_ensemble_check(a, calibration_levels().energies, 0.05, 1), ArgumentError);
    a.K = 1.0;
    EXPECT_THROW(result2_ensemble_check(a, {0.0, 0.1}, 0.05, 1), ArgumentError);
    SmoothAnsatz empty;
    EXPECT_THROW(result2_ensemble_check(empty, calibration_levels().energies, 0.05, 1), ArgumentError);
}

TEST(Export, FrequencyCsv) {
    const auto g = symmetric_set({1.0}, {0.1});
    std::ostringstream os;
    write_frequency_csv(os, cg_frequency_signal(g, CoarseGrainConfig::for_gaps(g, 0.2)));
    EXPECT_EQ(os.str().rfind("omega,re_g,abs_g2\n", 0), 0u);
}
