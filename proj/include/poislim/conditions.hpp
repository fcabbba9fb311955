#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "poislim/schedule.hpp"

namespace poislim {

namespace detail {

// Tail sums of geometric weights, q in (0,1), p = 1-q:
//   geom_s0(J) = sum_{j>=J} q^j      = q^J / p
//   geom_s1(J) = sum_{j>=J} j q^j    = q^J (J p + q) / p^2
//   geom_s2(J) = sum_{j>=J} j^2 q^j  = q^J (J^2 p^2 + 2 J p q + q (1+q)) / p^3
inline double geom_s0(double q, std::int64_t J) {
    const double p = 1.0 - q;
    return std::pow(q, static_cast<double>(J)) / p;
}
inline double geom_s1(double q, std::int64_t J) {
    const double p = 1.0 - q;
    const double Jd = static_cast<double>(J);
    return std::pow(q, Jd) * (Jd * p + q) / (p * p);
}
inline double geom_s2(double q, std::int64_t J) {
    const double p = 1.0 - q;
    const double Jd = static_cast<double>(J);
    return std::pow(q, Jd) * (Jd * Jd * p * p + 2.0 * Jd * p * q + q * (1.0 + q)) /
           (p * p * p);
}

// Centered second-moment tail of one geometric cell beyond J:
// sum_{j>J} (j - a)^2 p q^j with a = q/p.
inline double geom_centered_tail(double p, std::int64_t J) {
    const double q = 1.0 - p;
    const double a = q / p;
    return p * (geom_s2(q, J + 1) - 2.0 * a * geom_s1(q, J + 1) +
                a * a * geom_s0(q, J + 1));
}

// Raw second-moment tail beyond J: sum_{j>J} j^2 p q^j.
inline double geom_raw_tail(double p, std::int64_t J) {
    return p * geom_s2(1.0 - p, J + 1);
}

inline void require_eps_unit(double eps, const char* where) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument(std::string(where) +
                                    ": eps must lie in (0,1), got " +
                                    std::to_string(eps));
}

} // namespace detail

/// UAN functional sup_k P(|X_{k,n} - a_{k,n}| >= eps), evaluated exactly from
/// each cell's law (geometric tails in closed form, no truncation). Atoms
/// landing exactly on the boundary |y - a| = eps count toward the event.
inline double uan(const RowSchedule& row, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("uan: eps must be positive");
    double sup = 0.0;
    for (double p : row.params) {
        const double q = 1.0 - p;
        double cell;
        if (row.kind == LawKind::Bernoulli) {
            cell = (p >= eps ? q : 0.0) + (q >= eps ? p : 0.0);
        } else {
            const double a = q / p;
            double left = 0.0;
            if (a - eps >= 0.0) {
                const auto j_left = static_cast<std::int64_t>(std::floor(a - eps));
                left = 1.0 - std::pow(q, static_cast<double>(j_left + 1));
            }
            const auto j_right = static_cast<std::int64_t>(std::ceil(a + eps));
            cell = left + std::pow(q, static_cast<double>(j_right));
        }
        sup = std::max(sup, cell);
    }
    return sup;
}

/// MV(n,X) = Var(S_n[X]) = sum_k sigma^2_{k,n}.
inline double mv(const RowSchedule& row) {
    double s = 0.0;
    for (double p : row.params) s += cell_variance(CellLaw(row.kind, p));
    return s;
}

/// sum_k a_{k,n}.
inline double mean_sum(const RowSchedule& row) {
    double s = 0.0;
    for (double p : row.params) s += cell_mean(CellLaw(row.kind, p));
    return s;
}

struct SpectralAtom {
    double location;
    double mass;
};

/// Atomic representation of K_n (raw) or K_n* (mean-centered): the
/// y^2-weighted aggregate of the cell laws. Atoms are sorted by location with
/// exactly-equal locations merged; `trimmed` reports the y^2-mass removed by
/// truncating geometric supports.
struct SpectralMeasure {
    std::vector<SpectralAtom> atoms;
    bool centered = false;
    double trimmed = 0.0;

    double total_mass() const {
        double s = 0.0;
        for (const auto& atom : atoms) s += atom.mass;
        return s;
    }
};

/// Build K_n (centered = false) or K_n* (centered = true). Geometric cells are
/// truncated at the smallest J whose trimmed y^2-mass is <= tol/k(n), so the
/// measure's total trimmed mass is <= tol.
inline SpectralMeasure spectral_measure(const RowSchedule& row, bool centered,
                                        double tol = 1e-12) {
    detail::require_tolerance(tol, "spectral_measure");
    const double budget = tol / static_cast<double>(row.params.size());
    std::vector<SpectralAtom> atoms;
    double trimmed = 0.0;
    for (double p : row.params) {
        const double q = 1.0 - p;
        if (row.kind == LawKind::Bernoulli) {
            if (centered) {
                atoms.push_back({-p, p * p * q});
                atoms.push_back({1.0 - p, q * q * p});
            } else {
                atoms.push_back({1.0, p});  // y = 0 carries no y^2-mass
            }
        } else {
            const double a = q / p;
            auto trimmed_beyond = [&](std::int64_t J) {
                return centered ? detail::geom_centered_tail(p, J)
                                : detail::geom_raw_tail(p, J);
            };
            // minimal J with trimmed mass <= budget (monotone in J):
            // exponential search, then bisection
            std::int64_t hi = 1;
            while (trimmed_beyond(hi) > budget) {
                hi *= 2;
                detail::require_support(hi, "spectral_measure");
            }
            std::int64_t lo = 0;
            while (lo < hi) {
                const std::int64_t mid = lo + (hi - lo) / 2;
                if (trimmed_beyond(mid) <= budget)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            const std::int64_t J = lo;
            double mass_j = p;  // p q^j
            for (std::int64_t j = 0; j <= J; ++j) {
                const double loc = centered ? static_cast<double>(j) - a
                                            : static_cast<double>(j);
                const double w = loc * loc * mass_j;
                if (w > 0.0) atoms.push_back({loc, w});
                mass_j *= q;
            }
            trimmed += trimmed_beyond(J);
        }
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const SpectralAtom& x, const SpectralAtom& y) {
                  return x.location < y.location;
              });
    std::vector<SpectralAtom> merged;
    for (const auto& atom : atoms) {
        if (!merged.empty() && merged.back().location == atom.location)
            merged.back().mass += atom.mass;
        else
            merged.push_back(atom);
    }
    return SpectralMeasure{std::move(merged), centered, trimmed};
}

/// K(x): total atom mass at locations <= x (right-continuous step function).
inline double evaluate_K(const SpectralMeasure& measure, double x) {
    double s = 0.0;
    for (const auto& atom : measure.atoms) {
        if (atom.location > x) break;
        s += atom.mass;
    }
    return s;
}

/// Lindeberg-Gaussian functional L_{n,G}(eps): y^2-mass of the raw cell laws
/// outside (-eps, eps), geometric parts in closed form.
inline double lindeberg_gauss(const RowSchedule& row, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("lindeberg_gauss: eps must be positive");
    double total = 0.0;
    for (double p : row.params) {
        if (row.kind == LawKind::Bernoulli) {
            if (1.0 >= eps) total += p;
        } else {
            const auto j0 = std::max<std::int64_t>(
                1, static_cast<std::int64_t>(std::ceil(eps)));
            total += p * detail::geom_s2(1.0 - p, j0);
        }
    }
    return total;
}

namespace detail {

// Integers j >= 0 with |j - a - 1| < eps, i.e. the atoms EXCLUDED from the
// Lindeberg-Poisson sum. eps < 1 keeps this to at most two integers.
inline void excluded_lattice_points(double a, double eps, std::vector<std::int64_t>& out) {
    out.clear();
    const double center = a + 1.0;
    auto lo = static_cast<std::int64_t>(std::floor(center - eps));
    auto hi = static_cast<std::int64_t>(std::ceil(center + eps));
    for (std::int64_t j = std::max<std::int64_t>(lo, 0); j <= hi; ++j) {
        const double dev = std::abs(static_cast<double>(j) - center);
        if (!(dev >= eps)) out.push_back(j);
    }
}

} // namespace detail

/// Lindeberg-Poisson functional L_{n,P}(eps): the mean-centered y^2-mass of
/// the row outside (1-eps, 1+eps),
///
///   sum_k sum_j 1{ |(j - a_k) - 1| >= eps } (j - a_k)^2 P(X_{k,n} = j).
///
/// Evaluated as the full centered second moment (sigma^2 per cell, closed
/// form) minus the finitely many excluded atoms, so no truncation enters.
/// eps is restricted to (0,1); the customary reference value is eps = 1/2.
inline double lindeberg_poisson(const RowSchedule& row, double eps) {
    detail::require_eps_unit(eps, "lindeberg_poisson");
    double total = 0.0;
    std::vector<std::int64_t> excluded;
    for (double p : row.params) {
        const double q = 1.0 - p;
        const double a = row.kind == LawKind::Bernoulli ? p : q / p;
        double cell = cell_variance(CellLaw(row.kind, p));
        detail::excluded_lattice_points(a, eps, excluded);
        for (std::int64_t j : excluded) {
            double mass;
            if (row.kind == LawKind::Bernoulli)
                mass = j == 0 ? q : (j == 1 ? p : 0.0);
            else
                mass = p * std::pow(q, static_cast<double>(j));
            const double dev = static_cast<double>(j) - a;
            cell -= dev * dev * mass;
        }
        total += cell;
    }
    return total;
}

/// Bernoulli B(eps,n): literal two-term sum
///   sum_k sum_{j=0}^{1} 1{ |j - p_k - 1| >= eps } (j - p_k)^2 p_k^j q_k^{1-j}.
/// The indicator centers at the cell mean p_k, so this is the Lindeberg-
/// Poisson functional of a Bernoulli row written out atom by atom.
inline double b_functional_bernoulli(const RowSchedule& row, double eps) {
    detail::require_kind(row, LawKind::Bernoulli, "b_functional_bernoulli");
    detail::require_eps_unit(eps, "b_functional_bernoulli");
    double total = 0.0;
    for (double p : row.params) {
        const double q = 1.0 - p;
        for (int j = 0; j <= 1; ++j) {
            const double jd = static_cast<double>(j);
            if (std::abs(jd - p - 1.0) >= eps) {
                const double dev = jd - p;
                total += dev * dev * (j == 1 ? p : q);
            }
        }
    }
    return total;
}

/// Geometric B(eps,n): per-cell series
///   sum_{j>=0} 1{ |j - q/p - 1| >= eps } (j - q/p)^2 p q^j,
/// evaluated from the derivative identities sum q^j = 1/p, sum j q^{j-1} =
/// 1/p^2, sum j(j-1) q^{j-2} = 2/p^3 for the all-j total, minus the finitely
/// many excluded atoms. No truncation error beyond float rounding.
inline double b_functional_geometric(const RowSchedule& row, double eps) {
    detail::require_kind(row, LawKind::CorrectedGeometric, "b_functional_geometric");
    detail::require_eps_unit(eps, "b_functional_geometric");
    double total = 0.0;
    std::vector<std::int64_t> excluded;
    for (double p : row.params) {
        const double q = 1.0 - p;
        const double a = q / p;
        // E X = q * (1/p^2) * p, E X(X-1) = q^2 * (2/p^3) * p; assemble
        // E (X - a)^2 from the series sums rather than the closed form.
        const double s0 = 1.0 / p;
        const double s1 = q / (p * p);
        const double s2 = q * (2.0 * q / (p * p * p)) + s1;  // sum j^2 q^j
        double cell = p * (s2 - 2.0 * a * s1 + a * a * s0);
        detail::excluded_lattice_points(a, eps, excluded);
        for (std::int64_t j : excluded) {
            const double dev = static_cast<double>(j) - a;
            cell -= dev * dev * p * std::pow(q, static_cast<double>(j));
        }
        total += cell;
    }
    return total;
}

/// The j >= 2 block of one geometric cell's B(eps,k,n) series. Its classical
/// envelope is 2 (1 + q) q (q/p + 4 q/p^3).
inline double geometric_b_tail_block(double p, double eps) {
    detail::require_probability(p, "geometric_b_tail_block");
    detail::require_eps_unit(eps, "geometric_b_tail_block");
    const double q = 1.0 - p;
    const double a = q / p;
    double block = p * (detail::geom_s2(q, 2) - 2.0 * a * detail::geom_s1(q, 2) +
                        a * a * detail::geom_s0(q, 2));
    std::vector<std::int64_t> excluded;
    detail::excluded_lattice_points(a, eps, excluded);
    for (std::int64_t j : excluded) {
        if (j < 2) continue;
        const double dev = static_cast<double>(j) - a;
        block -= dev * dev * p * std::pow(q, static_cast<double>(j));
    }
    return block;
}

enum class TheoremId { T1, T2, T3, T4 };

inline const char* theorem_name(TheoremId t) {
    switch (t) {
        case TheoremId::T1: return "T1";
        case TheoremId::T2: return "T2";
        case TheoremId::T3: return "T3";
        case TheoremId::T4: return "T4";
    }
    return "?";
}

/// One tracked hypothesis quantity: its value at this n, the limit target,
/// and whether the |value - target| sequence trends toward 0 across the grid.
struct HypothesisCheck {
    std::string name;
    double value = 0.0;
    double target = 0.0;
    bool trending = false;
};

/// Measured functionals and hypothesis quantities for one row, plus the
/// grid-level verdict. Sup/sum columns are literal in the stored parameters
/// p_{k,n} (and their complements q_{k,n} = 1 - p_{k,n}).
struct ConditionReport {
    std::int64_t n = 0;
    std::int64_t kn = 0;
    double eps = 0.0;
    double sup_p = 0.0, sum_p = 0.0;
    double sup_q = 0.0, sum_q = 0.0;
    double sup_pq = 0.0, sum_pq = 0.0;
    double sup_q_over_p2 = 0.0, sum_q_over_p = 0.0, sum_q_over_p2 = 0.0;
    double uan = 0.0;
    double mv = 0.0;
    double mean_sum = 0.0;
    double lindeberg_gauss = 0.0;
    double lindeberg_poisson = 0.0;
    double b_functional = 0.0;
    std::vector<HypothesisCheck> checks;
    bool verdict_pass = false;
    bool h_sums_disagree = false;  // T4: sum q/p and sum q/p^2 head apart
};

/// "Consistent with convergence": |value - target| non-increasing (with float
/// slack) at every grid step and strictly below its start, unless the quantity
/// already sits at the target. Diagnostic only; finitely many n prove nothing.
inline bool trend_consistent(const std::vector<double>& distances,
                             double target_scale = 1.0) {
    if (distances.empty()) return false;
    for (std::size_t i = 0; i + 1 < distances.size(); ++i)
        if (distances[i + 1] > distances[i] * (1.0 + 1e-9) + 1e-12) return false;
    const double at_target = 1e-12 * std::max(1.0, std::abs(target_scale));
    return distances.back() <= at_target || distances.back() < distances.front();
}

/// Evaluate the hypothesis quantities of one of the four theorems over an
/// increasing n-grid (k(n) = n). Verdicts report trends of the measured
/// values toward their targets; the raw numbers are always carried alongside.
inline std::vector<ConditionReport> theorem_verdict(const ScheduleFamily& family,
                                                    const std::vector<std::int64_t>& n_grid,
                                                    double eps, TheoremId theorem) {
    if (n_grid.empty())
        throw std::invalid_argument("theorem_verdict: n-grid must be nonempty");
    for (std::size_t i = 0; i + 1 < n_grid.size(); ++i)
        if (n_grid[i + 1] <= n_grid[i])
            throw std::invalid_argument("theorem_verdict: n-grid must be increasing");
    detail::require_eps_unit(eps, "theorem_verdict");
    if (family.generator == GeneratorId::Explicit)
        throw std::invalid_argument(
            "theorem_verdict: requires a generated family with a lambda target");
    const bool needs_bernoulli = theorem == TheoremId::T1 || theorem == TheoremId::T3;
    if (needs_bernoulli != (family.kind == LawKind::Bernoulli))
        throw std::invalid_argument(
            std::string("theorem_verdict: theorem ") + theorem_name(theorem) +
            " applies to " + (needs_bernoulli ? "bernoulli" : "geometric") +
            " rows, schedule kind is " + law_kind_name(family.kind));

    std::vector<ConditionReport> reports;
    reports.reserve(n_grid.size());
    for (std::int64_t n : n_grid) {
        const RowSchedule row = generate_row(family, n, n);
        ConditionReport r;
        r.n = n;
        r.kn = row.kn();
        r.eps = eps;
        for (double p : row.params) {
            const double q = 1.0 - p;
            r.sup_p = std::max(r.sup_p, p);
            r.sum_p += p;
            r.sup_q = std::max(r.sup_q, q);
            r.sum_q += q;
            r.sup_pq = std::max(r.sup_pq, p * q);
            r.sum_pq += p * q;
            r.sup_q_over_p2 = std::max(r.sup_q_over_p2, q / (p * p));
            r.sum_q_over_p += q / p;
            r.sum_q_over_p2 += q / (p * p);
        }
        r.uan = uan(row, eps);
        r.mv = mv(row);
        r.mean_sum = mean_sum(row);
        r.lindeberg_gauss = lindeberg_gauss(row, eps);
        r.lindeberg_poisson = lindeberg_poisson(row, eps);
        r.b_functional = family.kind == LawKind::Bernoulli
                             ? b_functional_bernoulli(row, eps)
                             : b_functional_geometric(row, eps);
        reports.push_back(std::move(r));
    }

    struct Tracked {
        const char* name;
        double target;
        double (*get)(const ConditionReport&);
    };
    const double lambda = family.lambda;
    std::vector<Tracked> tracked;
    switch (theorem) {
        case TheoremId::T1:
            tracked = {{"sup_p", 0.0, [](const ConditionReport& r) { return r.sup_p; }},
                       {"sum_p", lambda, [](const ConditionReport& r) { return r.sum_p; }}};
            break;
        case TheoremId::T2:
            tracked = {{"sup_q", 0.0, [](const ConditionReport& r) { return r.sup_q; }},
                       {"sum_q", lambda, [](const ConditionReport& r) { return r.sum_q; }}};
            break;
        case TheoremId::T3:
            tracked = {{"sup_pq", 0.0, [](const ConditionReport& r) { return r.sup_pq; }},
                       {"sum_pq", lambda, [](const ConditionReport& r) { return r.sum_pq; }},
                       {"sum_p", lambda, [](const ConditionReport& r) { return r.sum_p; }},
                       {"b_functional", 0.0,
                        [](const ConditionReport& r) { return r.b_functional; }}};
            break;
        case TheoremId::T4:
            tracked = {{"sup_q_over_p2", 0.0,
                        [](const ConditionReport& r) { return r.sup_q_over_p2; }},
                       {"sum_q_over_p", lambda,
                        [](const ConditionReport& r) { return r.sum_q_over_p; }},
                       {"sum_q_over_p2", lambda,
                        [](const ConditionReport& r) { return r.sum_q_over_p2; }},
                       {"b_functional", 0.0,
                        [](const ConditionReport& r) { return r.b_functional; }}};
            break;
    }

    bool all_trending = true;
    std::vector<double> dist(reports.size());
    for (const auto& t : tracked) {
        for (std::size_t i = 0; i < reports.size(); ++i)
            dist[i] = std::abs(t.get(reports[i]) - t.target);
        const bool ok = trend_consistent(dist, t.target);
        all_trending = all_trending && ok;
        for (std::size_t i = 0; i < reports.size(); ++i)
            reports[i].checks.push_back(
                {t.name, t.get(reports[i]), t.target, ok});
    }
    const bool h_disagree =
        theorem == TheoremId::T4 &&
        std::abs(reports.back().sum_q_over_p - reports.back().sum_q_over_p2) >
            0.05 * std::max({1.0, std::abs(reports.back().sum_q_over_p),
                             std::abs(reports.back().sum_q_over_p2)});
    for (auto& r : reports) {
        r.verdict_pass = all_trending;
        r.h_sums_disagree = h_disagree;
    }
    return reports;
}

} // namespace poislim
