#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "poislim/conditions.hpp"
#include "poislim/schedule.hpp"

namespace poislim {

/// Default evaluation grid for characteristic-function comparisons:
/// 101 equally spaced points on [-5, 5].
inline constexpr double kCfGridLo = -5.0;
inline constexpr double kCfGridHi = 5.0;
inline constexpr std::size_t kCfGridPoints = 101;

/// A characteristic function sampled on an increasing grid of real t.
struct CfGrid {
    std::vector<double> ts;
    std::vector<std::complex<double>> values;
};

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo))
        throw std::invalid_argument("uniform_grid: need hi > lo and >= 2 points");
    std::vector<double> ts(points);
    for (std::size_t i = 0; i < points; ++i)
        ts[i] = lo + (hi - lo) * static_cast<double>(i) /
                         static_cast<double>(points - 1);
    return ts;
}

/// Characteristic function of one cell:
/// Bernoulli: (1-p) + p e^{it}; corrected geometric: p / (1 - q e^{it}).
/// The geometric denominator never vanishes: |1 - q e^{it}| >= 1 - q > 0.
inline std::complex<double> cell_cf(const CellLaw& law, double t) {
    const std::complex<double> eit{std::cos(t), std::sin(t)};
    const double q = 1.0 - law.p;
    if (law.kind == LawKind::Bernoulli) return q + law.p * eit;
    return law.p / (1.0 - q * eit);
}

/// Characteristic function of the row sum, prod_k cell_cf(k, t), accumulated
/// as a sum of complex logs so that rows with very many cells do not
/// underflow. exp restores the product exactly regardless of log branches;
/// a zero factor short-circuits to 0.
inline std::complex<double> row_cf(const RowSchedule& row, double t) {
    std::complex<double> log_sum = 0.0;
    for (double p : row.params) {
        const std::complex<double> f = cell_cf(CellLaw(row.kind, p), t);
        if (f == std::complex<double>(0.0, 0.0)) return 0.0;
        log_sum += std::log(f);
    }
    return std::exp(log_sum);
}

/// exp(lambda (e^{it} - 1)).
inline std::complex<double> poisson_cf(double lambda, double t) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("poisson_cf: lambda must be positive");
    const std::complex<double> eit{std::cos(t), std::sin(t)};
    return std::exp(lambda * (eit - 1.0));
}

namespace detail {

// (e^{iux} - 1 - iux) / x^2 with its removable singularity at x = 0, where
// the value is -u^2/2 (a pure Gaussian component). For small |ux| the direct
// expression cancels badly, so a short series in z = iux is used:
// (e^z - 1 - z)/x^2 = -u^2 (1/2 + z/6 + z^2/24 + z^3/120 + z^4/720 + ...),
// truncation error below |z|^5/5040 of u^2.
inline std::complex<double> levy_integrand(double u, double x) {
    if (std::abs(x) <= 1e-8) return {-0.5 * u * u, 0.0};
    const std::complex<double> z{0.0, u * x};
    if (std::abs(u * x) < 1e-2) {
        const std::complex<double> series =
            0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0)));
        return -u * u * series;
    }
    return (std::exp(z) - 1.0 - z) / (x * x);
}

} // namespace detail

/// Levy exponent psi[K](u) = integral of (e^{iux} - 1 - iux)/x^2 dK(x) over
/// the atomic measure.
inline std::complex<double> levy_exponent(const SpectralMeasure& measure, double u) {
    std::complex<double> s = 0.0;
    for (const auto& atom : measure.atoms)
        s += atom.mass * detail::levy_integrand(u, atom.location);
    return s;
}

inline CfGrid row_cf_grid(const RowSchedule& row, const std::vector<double>& ts) {
    CfGrid g{ts, {}};
    g.values.reserve(ts.size());
    for (double t : ts) g.values.push_back(row_cf(row, t));
    return g;
}

inline CfGrid poisson_cf_grid(double lambda, const std::vector<double>& ts) {
    CfGrid g{ts, {}};
    g.values.reserve(ts.size());
    for (double t : ts) g.values.push_back(poisson_cf(lambda, t));
    return g;
}

/// The accompanying infinitely divisible law of the row: the characteristic
/// function exp(psi[K_n*](u) + i u sum_k a_{k,n}), built from the centered
/// spectral measure. Under the Poisson regime it tracks row_cf.
inline CfGrid accompanying_cf_grid(const RowSchedule& row, const std::vector<double>& ts,
                                   double tol = 1e-12) {
    const SpectralMeasure measure = spectral_measure(row, true, tol);
    const double shift = mean_sum(row);
    CfGrid g{ts, {}};
    g.values.reserve(ts.size());
    for (double u : ts) {
        const std::complex<double> expo =
            levy_exponent(measure, u) + std::complex<double>(0.0, u * shift);
        g.values.push_back(std::exp(expo));
    }
    return g;
}

/// Max pointwise modulus difference between two grids over identical ts.
inline double cf_distance(const CfGrid& a, const CfGrid& b) {
    if (a.ts != b.ts)
        throw std::invalid_argument("cf_distance: evaluation grids differ");
    double d = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

} // namespace poislim
