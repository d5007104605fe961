#ifndef DEPHASE_CORE_HPP
#define DEPHASE_CORE_HPP

// Shared error types, uniform grids, trapezoidal quadrature and Gaussian helpers.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dephase {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt2Pi = 2.5066282746310002; // sqrt(2 pi)

// Every error the library raises carries a stable machine-readable code so the
// CLI can emit it as JSON.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct ArgumentError : Error {
    explicit ArgumentError(const std::string& w) : Error("argument", w) {}
};
struct ResourceError : Error {
    explicit ResourceError(const std::string& w) : Error("resource", w) {}
};
struct ContractViolation : Error {
    explicit ContractViolation(const std::string& w) : Error("contract_violation", w) {}
};
struct DegenerateObservable : Error {
    explicit DegenerateObservable(const std::string& w) : Error("degenerate_observable", w) {}
};
struct DegenerateDensity : Error {
    explicit DegenerateDensity(const std::string& w) : Error("degenerate_density", w) {}
};
struct NoDynamics : Error {
    explicit NoDynamics(const std::string& w) : Error("no_dynamics", w) {}
};
struct InfiniteTimeSignal : Error {
    explicit InfiniteTimeSignal(const std::string& w) : Error("infinite_time_signal", w) {}
};
struct GridCoverageError : Error {
    explicit GridCoverageError(const std::string& w) : Error("grid_coverage", w) {}
};
struct NoValidEpsilon : Error {
    explicit NoValidEpsilon(const std::string& w) : Error("no_valid_epsilon", w) {}
};
struct OutsideValidity : Error {
    explicit OutsideValidity(const std::string& w) : Error("outside_validity", w) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error("domain", w) {}
};
struct NoBandWeight : Error {
    explicit NoBandWeight(const std::string& w) : Error("no_band_weight", w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("config", w) {}
};

/// Uniformly spaced, strictly increasing axis: x_k = start + k * step.
class UniformAxis {
public:
    UniformAxis() = default;
    UniformAxis(double start, double step, std::size_t count)
        : start_(start), step_(step), count_(count) {
        if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(start))
            throw ArgumentError("uniform axis needs a finite positive step");
        if (count == 0) throw ArgumentError("uniform axis needs at least one sample");
    }

    /// Axis covering [lo, hi] with a step no larger than max_step.
    static UniformAxis covering(double lo, double hi, double max_step) {
        if (!(hi > lo)) throw ArgumentError("axis bounds must satisfy lo < hi");
        if (!(max_step > 0.0)) throw ArgumentError("axis step must be positive");
        auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / max_step - 1e-9));
        if (intervals == 0) intervals = 1;
        return {lo, (hi - lo) / static_cast<double>(intervals), intervals + 1};
    }

    /// Axis [start, start + step * (count-1)] with an exact step.
    static UniformAxis from_step(double lo, double hi, double step) {
        if (!(hi >= lo)) throw ArgumentError("axis bounds must satisfy lo <= hi");
        auto intervals = static_cast<std::size_t>(std::llround((hi - lo) / step));
        return {lo, step, intervals + 1};
    }

    double operator[](std::size_t k) const { return start_ + static_cast<double>(k) * step_; }
    double front() const { return start_; }
    double back() const { return (*this)[count_ - 1]; }
    double step() const { return step_; }
    std::size_t size() const { return count_; }

    bool same_as(const UniformAxis& o) const {
        return count_ == o.count_ && std::abs(start_ - o.start_) <= 1e-12 * (1.0 + std::abs(start_)) &&
               std::abs(step_ - o.step_) <= 1e-12 * step_;
    }

    std::vector<double> values() const {
        std::vector<double> v(count_);
        for (std::size_t k = 0; k < count_; ++k) v[k] = (*this)[k];
        return v;
    }

private:
    double start_ = 0.0;
    double step_ = 1.0;
    std::size_t count_ = 1;
};

/// Complex samples on a uniform time or frequency axis.
struct SignalGrid {
    UniformAxis axis;
    std::vector<cplx> values;

    SignalGrid() = default;
    explicit SignalGrid(UniformAxis a) : axis(a), values(a.size()) {}
    SignalGrid(UniformAxis a, std::vector<cplx> v) : axis(a), values(std::move(v)) {
        if (values.size() != axis.size()) throw ArgumentError("signal size does not match its axis");
    }
    std::size_t size() const { return values.size(); }
};

inline double trapezoid(std::span<const double> y, double step) {
    if (y.size() < 2) return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t k = 1; k + 1 < y.size(); ++k) s += y[k];
    return s * step;
}

/// Composite Simpson; needs an odd sample count.
inline double simpson(std::span<const double> y, double step) {
    if (y.size() < 3 || y.size() % 2 == 0) throw ArgumentError("simpson needs an odd number of samples >= 3");
    double s = y.front() + y.back();
    for (std::size_t k = 1; k + 1 < y.size(); ++k) s += (k % 2 ? 4.0 : 2.0) * y[k];
    return s * step / 3.0;
}

inline cplx trapezoid(std::span<const cplx> y, double step) {
    if (y.size() < 2) return {0.0, 0.0};
    cplx s = 0.5 * (y.front() + y.back());
    for (std::size_t k = 1; k + 1 < y.size(); ++k) s += y[k];
    return s * step;
}

/// Running trapezoidal integral; result[0] = 0.
inline std::vector<double> cumulative_trapezoid(std::span<const double> y, double step) {
    std::vector<double> out(y.size(), 0.0);
    for (std::size_t k = 1; k < y.size(); ++k) out[k] = out[k - 1] + 0.5 * step * (y[k - 1] + y[k]);
    return out;
}

/// Normalized Gaussian N_sigma(x).
inline double gaussian(double x, double sigma) {
    return std::exp(-0.5 * x * x / (sigma * sigma)) / (kSqrt2Pi * sigma);
}

inline double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

/// Half-width (in units of sigma) beyond which exp(-x^2/2) < 1e-17.
inline constexpr double kGaussianCutoff = 8.9;

} // namespace dephase

#endif // DEPHASE_CORE_HPP
