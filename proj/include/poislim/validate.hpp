#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "poislim/charfn.hpp"
#include "poislim/exact_sum.hpp"
#include "poislim/pmf.hpp"
#include "poislim/rng.hpp"
#include "poislim/schedule.hpp"

namespace poislim {

struct TvInterval {
    double lo;
    double hi;
};

/// Total variation distance between two lattice laws: lo is half the l1
/// distance over the union of represented supports; hi adds half the
/// unrepresented tail mass of each side.
inline TvInterval tv_distance(const Pmf& a, const Pmf& b) {
    const std::int64_t lo_j = std::min(a.offset(), b.offset());
    const std::int64_t hi_j = std::max(a.support_end(), b.support_end());
    double l1 = 0.0;
    for (std::int64_t j = lo_j; j <= hi_j; ++j) l1 += std::abs(a.at(j) - b.at(j));
    const double lo = 0.5 * l1;
    return TvInterval{lo, std::min(1.0, lo + 0.5 * (a.tail() + b.tail()))};
}

/// Kolmogorov distance: max over lattice points of |CDF_a - CDF_b| (the
/// represented parts; beyond the union support the gap is |a.tail - b.tail|,
/// captured at the last point).
inline double kolmogorov_distance(const Pmf& a, const Pmf& b) {
    const std::int64_t lo_j = std::min(a.offset(), b.offset());
    const std::int64_t hi_j = std::max(a.support_end(), b.support_end());
    double fa = 0.0, fb = 0.0, d = 0.0;
    for (std::int64_t j = lo_j; j <= hi_j; ++j) {
        fa += a.at(j);
        fb += b.at(j);
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

/// Empirical law of S_n over `reps` independent replicates. Replicate r draws
/// cell k from counter index r*kn + k of the SplitMix64 stream keyed by
/// `seed` (see rng.hpp), so output is a pure function of (row, reps, seed).
inline Pmf simulate_row_sum(const RowSchedule& row, std::uint64_t reps,
                            std::uint64_t seed) {
    if (reps < 1) throw std::invalid_argument("simulate_row_sum: reps must be >= 1");
    const auto kn = static_cast<std::uint64_t>(row.kn());
    std::vector<std::uint64_t> counts;
    std::int64_t max_seen = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
        RngStream stream{seed, r * kn};
        std::int64_t s = 0;
        for (double p : row.params)
            s += sample_cell(CellLaw(row.kind, p), stream);
        if (s >= static_cast<std::int64_t>(counts.size()))
            counts.resize(static_cast<std::size_t>(s) + 1, 0);
        counts[static_cast<std::size_t>(s)] += 1;
        max_seen = std::max(max_seen, s);
    }
    std::vector<double> masses(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j)
        masses[j] = static_cast<double>(counts[j]) / static_cast<double>(reps);
    return Pmf(0, std::move(masses), 0.0);
}

/// Distances to the Poisson limit along an n-grid (k(n) = n).
/// tv/kolmogorov/cf compare the exact row-sum law against P(lambda_target);
/// tv_plugin compares against P(lambda_hat_n) with lambda_hat_n = sum a_{k,n}.
struct ConvergenceTrace {
    std::vector<std::int64_t> n_grid;
    std::vector<double> lambda_hat;
    std::vector<double> tv_lo, tv_hi;
    std::vector<double> tv_plugin_lo, tv_plugin_hi;
    std::vector<double> kolmogorov;
    std::vector<double> cf_dist;
    std::vector<double> mc_tv;  // empty unless reps > 0
};

struct TraceOptions {
    double tol = 1e-12;          // truncation budget for geometric sums / Poisson ref
    std::uint64_t reps = 0;      // Monte Carlo replicates per n (0 = off)
    std::uint64_t seed = 0;
    double grid_lo = kCfGridLo;
    double grid_hi = kCfGridHi;
    std::size_t grid_points = kCfGridPoints;
};

inline ConvergenceTrace convergence_trace(const ScheduleFamily& family,
                                          const std::vector<std::int64_t>& n_grid,
                                          const TraceOptions& opt = {}) {
    if (n_grid.empty())
        throw std::invalid_argument("convergence_trace: n-grid must be nonempty");
    for (std::size_t i = 0; i + 1 < n_grid.size(); ++i)
        if (n_grid[i + 1] <= n_grid[i])
            throw std::invalid_argument("convergence_trace: n-grid must be increasing");
    if (!(family.lambda > 0.0) && family.generator != GeneratorId::Explicit)
        throw std::invalid_argument("convergence_trace: lambda must be positive");

    const std::vector<double> ts = uniform_grid(opt.grid_lo, opt.grid_hi, opt.grid_points);
    ConvergenceTrace trace;
    trace.n_grid = n_grid;
    for (std::int64_t n : n_grid) {
        const RowSchedule row = generate_row(family, n, n);
        const SumLaw law = sum_law(row, opt.tol);
        const double lambda_hat = mean_sum(row);
        const double lambda_ref =
            family.generator == GeneratorId::Explicit ? lambda_hat : family.lambda;
        const Pmf pois = poisson_pmf(lambda_ref, opt.tol);
        const Pmf pois_hat = poisson_pmf(lambda_hat, opt.tol);

        trace.lambda_hat.push_back(lambda_hat);
        const TvInterval tv = tv_distance(law.pmf, pois);
        trace.tv_lo.push_back(tv.lo);
        trace.tv_hi.push_back(tv.hi);
        const TvInterval tvp = tv_distance(law.pmf, pois_hat);
        trace.tv_plugin_lo.push_back(tvp.lo);
        trace.tv_plugin_hi.push_back(tvp.hi);
        trace.kolmogorov.push_back(kolmogorov_distance(law.pmf, pois));
        trace.cf_dist.push_back(
            cf_distance(row_cf_grid(row, ts), poisson_cf_grid(lambda_ref, ts)));
        if (opt.reps > 0) {
            // per-n stream key, split off the user seed
            const Pmf emp = simulate_row_sum(
                row, opt.reps, splitmix64_at(opt.seed, static_cast<std::uint64_t>(n)));
            trace.mc_tv.push_back(tv_distance(law.pmf, emp).lo);
        }
    }
    return trace;
}

} // namespace poislim
