#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "poislim/pmf.hpp"
#include "poislim/rng.hpp"

namespace poislim {

enum class LawKind { Bernoulli, CorrectedGeometric };

inline const char* law_kind_name(LawKind k) {
    return k == LawKind::Bernoulli ? "bernoulli" : "geometric";
}

namespace detail {
inline void require_probability(double p, const char* where) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument(std::string(where) +
                                    ": parameter p must lie strictly in (0,1), got " +
                                    std::to_string(p));
}
inline void require_tolerance(double tol, const char* where) {
    if (!(tol > 0.0 && tol < 1.0))
        throw std::invalid_argument(std::string(where) +
                                    ": tolerance must lie in (0,1), got " +
                                    std::to_string(tol));
}

// resource guard for truncated supports (2^25 lattice points ~ 256 MiB)
inline constexpr std::int64_t kMaxSupport = std::int64_t{1} << 25;

inline void require_support(std::int64_t points, const char* where) {
    if (points > kMaxSupport)
        throw std::invalid_argument(
            std::string(where) + ": truncated support needs " +
            std::to_string(points) +
            " lattice points; tighten tol or move p away from the boundary");
}
} // namespace detail

/// One cell of a triangular-array row. q = 1 - p is always derived, never
/// stored. Parameters on the boundary {0,1} are rejected, not special-cased.
struct CellLaw {
    LawKind kind;
    double p;

    CellLaw(LawKind k, double prob) : kind(k), p(prob) {
        detail::require_probability(p, "CellLaw");
    }
};

inline double cell_mean(const CellLaw& law) {
    const double q = 1.0 - law.p;
    return law.kind == LawKind::Bernoulli ? law.p : q / law.p;
}

inline double cell_variance(const CellLaw& law) {
    const double q = 1.0 - law.p;
    return law.kind == LawKind::Bernoulli ? law.p * q : q / (law.p * law.p);
}

/// Per-cell means a_k and variances sigma²_k of a row, with their sums.
struct RowMoments {
    std::vector<double> means;
    std::vector<double> variances;
    double mean_sum = 0.0;
    double variance_sum = 0.0;
};

inline RowMoments row_moments(LawKind kind, std::span<const double> params) {
    RowMoments m;
    m.means.reserve(params.size());
    m.variances.reserve(params.size());
    for (double p : params) {
        CellLaw law(kind, p);
        m.means.push_back(cell_mean(law));
        m.variances.push_back(cell_variance(law));
        m.mean_sum += m.means.back();
        m.variance_sum += m.variances.back();
    }
    return m;
}

/// B(p): masses {1-p, p} at {0, 1}.
inline Pmf bernoulli_pmf(double p) {
    detail::require_probability(p, "bernoulli_pmf");
    return Pmf(0, {1.0 - p, p}, 0.0);
}

/// Corrected geometric law G*(p) = G(p) - 1: mass p q^j at j = 0, 1, 2, ...
/// Truncated at the smallest J with residual q^{J+1} <= tol; the residual is
/// carried as the certified tail.
inline Pmf corrected_geometric_pmf(double p, double tol) {
    detail::require_probability(p, "corrected_geometric_pmf");
    detail::require_tolerance(tol, "corrected_geometric_pmf");
    const double q = 1.0 - p;
    // minimal J with q^{J+1} <= tol; log estimate, then exact adjustment
    std::int64_t J = static_cast<std::int64_t>(
        std::floor(std::log(tol) / std::log(q)));
    J = std::max<std::int64_t>(J - 2, 0);
    while (std::pow(q, static_cast<double>(J + 1)) > tol) ++J;
    while (J > 0 && std::pow(q, static_cast<double>(J)) <= tol) --J;
    detail::require_support(J + 1, "corrected_geometric_pmf");
    std::vector<double> masses(static_cast<std::size_t>(J) + 1);
    double m = p;
    for (auto& out : masses) {
        out = m;
        m *= q;
    }
    return Pmf(0, std::move(masses), std::pow(q, static_cast<double>(J + 1)));
}

/// P(lambda) via the stable recurrence m_{j+1} = m_j * lambda / (j+1),
/// truncated when the residual 1 - sum falls at or below tol.
inline Pmf poisson_pmf(double lambda, double tol) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("poisson_pmf: lambda must be positive");
    if (!(lambda < 700.0))
        throw std::invalid_argument("poisson_pmf: lambda too large for the "
                                    "double-precision recurrence");
    detail::require_tolerance(tol, "poisson_pmf");
    std::vector<double> masses;
    double m = std::exp(-lambda);
    double cum = 0.0;
    std::int64_t j = 0;
    while (true) {
        masses.push_back(m);
        cum += m;
        if (1.0 - cum <= tol || m == 0.0) break;
        ++j;
        m *= lambda / static_cast<double>(j);
    }
    return Pmf(0, std::move(masses), std::max(0.0, 1.0 - cum));
}

/// Exact B(n, p) via the multiplicative recurrence
/// m_{j+1} = m_j * (n-j)/(j+1) * p/(1-p); no binomial coefficients are formed.
inline Pmf binomial_pmf(std::int64_t n, double p) {
    if (n < 1) throw std::invalid_argument("binomial_pmf: n must be >= 1");
    detail::require_probability(p, "binomial_pmf");
    const double q = 1.0 - p;
    const double ratio = p / q;
    double m = std::exp(static_cast<double>(n) * std::log1p(-p));
    if (m == 0.0)
        throw std::invalid_argument("binomial_pmf: (1-p)^n underflows; "
                                    "n is too large for the direct recurrence");
    std::vector<double> masses(static_cast<std::size_t>(n) + 1);
    for (std::int64_t j = 0; j <= n; ++j) {
        masses[static_cast<std::size_t>(j)] = m;
        m *= ratio * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    return Pmf(0, std::move(masses), 0.0);
}

/// Law of NB(n, p) - n on {0, 1, 2, ...}: mass C(n+j-1, j) p^n q^j at j,
/// computed by m_{j+1} = m_j * q * (n+j)/(j+1) and truncated with a certified
/// residual tail <= tol.
inline Pmf negative_binomial_shifted_pmf(std::int64_t n, double p, double tol) {
    if (n < 1)
        throw std::invalid_argument("negative_binomial_shifted_pmf: n must be >= 1");
    detail::require_probability(p, "negative_binomial_shifted_pmf");
    detail::require_tolerance(tol, "negative_binomial_shifted_pmf");
    const double q = 1.0 - p;
    double m = std::exp(static_cast<double>(n) * std::log(p));
    if (m == 0.0)
        throw std::invalid_argument("negative_binomial_shifted_pmf: p^n underflows; "
                                    "n is too large for the direct recurrence");
    std::vector<double> masses;
    double cum = 0.0;
    std::int64_t j = 0;
    while (true) {
        masses.push_back(m);
        cum += m;
        if (1.0 - cum <= tol || m == 0.0) break;
        m *= q * static_cast<double>(n + j) / static_cast<double>(j + 1);
        ++j;
        detail::require_support(j, "negative_binomial_shifted_pmf");
    }
    return Pmf(0, std::move(masses), std::max(0.0, 1.0 - cum));
}

/// Frozen sampling convention (inverse transform on one uniform draw):
/// X = 1 iff u < p.
inline std::int64_t bernoulli_inverse(double p, double u) {
    return u < p ? 1 : 0;
}

/// Frozen sampling convention: the smallest j >= 0 with CDF(j) = 1 - q^{j+1}
/// >= u, evaluated as max(0, ceil(log1p(-u)/log1p(-p)) - 1). Requires u in
/// [0, 1), which is what RngStream produces.
inline std::int64_t corrected_geometric_inverse(double p, double u) {
    if (!(u < 1.0))
        throw std::invalid_argument("corrected_geometric_inverse: u must be < 1");
    if (u <= 0.0) return 0;
    const double r = std::log1p(-u) / std::log1p(-p);
    const auto j = static_cast<std::int64_t>(std::ceil(r)) - 1;
    return j < 0 ? 0 : j;
}

/// Draw one cell value, consuming exactly one uniform from the stream.
inline std::int64_t sample_cell(const CellLaw& law, RngStream& stream) {
    const double u = stream.next_unit();
    return law.kind == LawKind::Bernoulli ? bernoulli_inverse(law.p, u)
                                          : corrected_geometric_inverse(law.p, u);
}

} // namespace poislim
