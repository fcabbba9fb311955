// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "oracles.hpp"
#include "poislim/poislim.hpp"

using namespace poislim;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  %2d. %s%s%s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
}

template <typename Fn>
void criterion(int idx, const std::string& name, Fn&& fn) {
    try {
        std::string detail;
        const bool pass = fn(detail);
        report(idx, name, pass, detail);
    } catch (const std::exception& e) {
        report(idx, name, false, std::string("exception: ") + e.what());
    }
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

RowSchedule random_bernoulli_row(std::mt19937_64& rng, std::int64_t kn, double lo,
                                 double hi) {
    std::uniform_real_distribution<double> unif(lo, hi);
    std::vector<double> params(static_cast<std::size_t>(kn));
    for (auto& p : params) p = unif(rng);
    return RowSchedule(LawKind::Bernoulli, std::move(params), kn);
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i]))
            return false;
    return true;
}

struct CliRun {
    int exit_code;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string(POISLIM_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, {}};
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

// 1. DP Poisson-binomial vs exhaustive 2^kn enumeration.
bool c1_enumeration_oracle(std::string& detail) {
    std::mt19937_64 rng(101);
    double max_err = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::int64_t kn = 1 + static_cast<std::int64_t>(rng() % 16);
        const RowSchedule row = random_bernoulli_row(rng, kn, 0.005, 0.995);
        const std::vector<double> expect = oracles::enum_poisson_binomial(row.params);
        const SumLaw law = poisson_binomial(row);
        for (std::int64_t j = 0; j <= kn; ++j)
            max_err = std::max(max_err,
                               std::abs(law.pmf.at(j) - expect[static_cast<std::size_t>(j)]));
    }
    detail = "200 rows, kn<=16, max abs err " + num(max_err) + " (tol 1e-12)";
    return max_err <= 1e-12;
}

// 2. DP vs CF-transform at kn in {64, 512, 2048}.
bool c2_cross_method(std::string& detail) {
    std::mt19937_64 rng(202);
    double max_err = 0.0;
    for (std::int64_t kn : {64, 512, 2048}) {
        std::vector<RowSchedule> rows;
        rows.push_back(random_bernoulli_row(rng, kn, 0.01, 0.99));
        ScheduleFamily f{LawKind::Bernoulli, GeneratorId::IidClassic, 1.0};
        rows.push_back(generate_row(f, kn, kn));
        for (const auto& row : rows) {
            const SumLaw dp = poisson_binomial(row);
            const SumLaw cf = poisson_binomial_cf(row);
            for (std::int64_t j = 0; j <= kn; ++j)
                max_err = std::max(max_err, std::abs(dp.pmf.at(j) - cf.pmf.at(j)));
        }
    }
    detail = "max per-point gap " + num(max_err) + " (tol 1e-10)";
    return max_err <= 1e-10;
}

// 3. geometric_sum vs negative_binomial_shifted_pmf closed form.
bool c3_geometric_oracle(std::string& detail) {
    double worst = 0.0;
    for (std::int64_t n : {2, 5, 20, 50}) {
        for (double p : {0.5, 0.8, 0.95}) {
            const RowSchedule row(
                LawKind::CorrectedGeometric,
                std::vector<double>(static_cast<std::size_t>(n), p), n);
            const SumLaw law = geometric_sum(row, 1e-12);
            const Pmf nb = negative_binomial_shifted_pmf(n, p, 1e-14);
            const double tol = 1e-10 + law.accumulated_tail;
            for (std::int64_t j = 0; j <= law.pmf.support_end(); ++j) {
                const double err = std::abs(law.pmf.at(j) - nb.at(j));
                worst = std::max(worst, err - law.accumulated_tail);
                if (err > tol) {
                    detail = "n=" + std::to_string(n) + " p=" + num(p) +
                             " j=" + std::to_string(j) + " err " + num(err);
                    return false;
                }
            }
        }
    }
    detail = "n in {2,5,20,50}, p in {0.5,0.8,0.95}, max(gap - tail) " + num(worst);
    return true;
}

// 4. Classical binomial regime at desk scale.
bool c4_binomial_regime(std::string& detail) {
    ScheduleFamily f{LawKind::Bernoulli, GeneratorId::IidClassic, 1.0};
    const ConvergenceTrace t = convergence_trace(f, {10, 100, 1000, 10000});
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < t.tv_lo.size(); ++i)
        decreasing = decreasing && t.tv_lo[i + 1] < t.tv_lo[i];
    const bool ceiling = t.tv_hi[1] <= 0.012;
    detail = "tv = {" + num(t.tv_lo[0]) + ", " + num(t.tv_lo[1]) + ", " +
             num(t.tv_lo[2]) + ", " + num(t.tv_lo[3]) + "}, tv(100) <= 0.012: " +
             (ceiling ? "yes" : "no");
    return decreasing && ceiling;
}

// 5. Shifted negative-binomial regime at desk scale (q_n = 1/n).
bool c5_shifted_nb_regime(std::string& detail) {
    ScheduleFamily f{LawKind::CorrectedGeometric, GeneratorId::IidClassic, 1.0};
    const ConvergenceTrace t = convergence_trace(f, {10, 100, 1000});
    bool ok = true;
    for (std::size_t i = 0; i + 1 < t.tv_lo.size(); ++i) {
        ok = ok && t.tv_lo[i + 1] < t.tv_lo[i];
        ok = ok && t.cf_dist[i + 1] < t.cf_dist[i];
    }
    ok = ok && t.cf_dist[2] < 0.02;
    detail = "tv = {" + num(t.tv_lo[0]) + ", " + num(t.tv_lo[1]) + ", " +
             num(t.tv_lo[2]) + "}, cf(1000) = " + num(t.cf_dist[2]) + " (< 0.02)";
    return ok;
}

// 6. T1 regime: LinearWeights Bernoulli.
bool c6_theorem1(std::string& detail) {
    ScheduleFamily f{LawKind::Bernoulli, GeneratorId::LinearWeights, 1.0};
    const std::vector<std::int64_t> grid{10, 100, 1000};
    const auto reports = theorem_verdict(f, grid, 0.5, TheoremId::T1);
    bool ok = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const double kn = static_cast<double>(grid[i]);
        ok = ok && reports[i].verdict_pass;
        ok = ok && std::abs(reports[i].sup_p - 2.0 / (kn + 1.0)) <= 1e-15;
        ok = ok && std::abs(reports[i].sum_p - 1.0) <= 1e-12;
    }
    const ConvergenceTrace t = convergence_trace(f, grid);
    for (std::size_t i = 0; i + 1 < t.tv_lo.size(); ++i)
        ok = ok && t.tv_lo[i + 1] < t.tv_lo[i];
    detail = "verdict pass, sup p = 2/(kn+1), sum p = 1 exactly, tv = {" +
             num(t.tv_lo[0]) + ", " + num(t.tv_lo[1]) + ", " + num(t.tv_lo[2]) + "}";
    return ok;
}

// 7. T2 regime: LinearWeights geometric.
bool c7_theorem2(std::string& detail) {
    ScheduleFamily f{LawKind::CorrectedGeometric, GeneratorId::LinearWeights, 1.0};
    const std::vector<std::int64_t> grid{10, 100, 1000};
    const auto reports = theorem_verdict(f, grid, 0.5, TheoremId::T2);
    bool ok = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const double kn = static_cast<double>(grid[i]);
        ok = ok && reports[i].verdict_pass;
        ok = ok && std::abs(reports[i].sup_q - 2.0 / (kn + 1.0)) <= 1e-12;
        ok = ok && std::abs(reports[i].sum_q - 1.0) <= 1e-12;
    }
    const ConvergenceTrace t = convergence_trace(f, grid);
    for (std::size_t i = 0; i + 1 < t.tv_lo.size(); ++i)
        ok = ok && t.tv_lo[i + 1] < t.tv_lo[i];
    detail = "verdict pass, sum q = 1 exactly, tv = {" + num(t.tv_lo[0]) + ", " +
             num(t.tv_lo[1]) + ", " + num(t.tv_lo[2]) + "}";
    return ok;
}

// 8. Lindeberg-Poisson identity against B functionals.
bool c8_lindeberg_identity(std::string& detail) {
    std::mt19937_64 rng(808);
    const double eps_grid[] = {0.1, 0.3, 0.5, 0.9};
    double worst_bern = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::int64_t kn = 1 + static_cast<std::int64_t>(rng() % 40);
        const RowSchedule row = random_bernoulli_row(rng, kn, 0.01, 0.99);
        for (double eps : eps_grid) {
            const double gap = std::abs(lindeberg_poisson(row, eps) -
                                        b_functional_bernoulli(row, eps));
            worst_bern = std::max(worst_bern, gap);
        }
    }
    double worst_geo = 0.0;
    std::uniform_real_distribution<double> unif(0.1, 0.98);
    for (int rep = 0; rep < 100; ++rep) {
        const std::int64_t kn = 1 + static_cast<std::int64_t>(rng() % 12);
        std::vector<double> params(static_cast<std::size_t>(kn));
        for (auto& p : params) p = unif(rng);
        const RowSchedule row(LawKind::CorrectedGeometric, params, kn);
        for (double eps : eps_grid) {
            double brute = 0.0;
            for (double p : params) brute += oracles::brute_b_geometric_cell(p, eps, 500);
            worst_geo = std::max(worst_geo,
                                 std::abs(b_functional_geometric(row, eps) - brute));
            worst_geo = std::max(worst_geo,
                                 std::abs(lindeberg_poisson(row, eps) - brute));
        }
    }
    detail = "bernoulli max gap " + num(worst_bern) + " (tol 1e-14), geometric vs " +
             "j<=500 brute force " + num(worst_geo) + " (tol 1e-10)";
    return worst_bern <= 1e-14 && worst_geo <= 1e-10;
}

// 9. Lindeberg-Poisson vanishing under the sup_p (lambda+1) envelope.
bool c9_lindeberg_vanishing(std::string& detail) {
    ScheduleFamily f{LawKind::Bernoulli, GeneratorId::IidClassic, 1.0};
    double prev = std::numeric_limits<double>::infinity();
    bool ok = true;
    std::string values;
    for (std::int64_t n : {10, 100, 1000, 10000}) {
        const RowSchedule row = generate_row(f, n, n);
        const double l = lindeberg_poisson(row, 0.5);
        const double sup_p = 1.0 / static_cast<double>(n);
        ok = ok && l < prev;
        ok = ok && l <= 1.1 * sup_p * (1.0 + 1.0);
        values += (values.empty() ? "" : ", ") + num(l);
        prev = l;
    }
    detail = "L_{n,P}(0.5) = {" + values + "}, envelope 1.1 sup_p (lambda+1)";
    return ok;
}

// 10. Levy exponent identities.
bool c10_levy(std::string& detail) {
    double worst = 0.0;
    for (double lambda : {0.5, 1.0, 2.0}) {
        SpectralMeasure m{{{1.0, lambda}}, true, 0.0};
        for (double u : {-3.0, -0.7, 0.25, 2.0}) {
            const std::complex<double> expect =
                lambda * (std::complex<double>(std::cos(u), std::sin(u)) - 1.0 -
                          std::complex<double>(0.0, u));
            worst = std::max(worst, std::abs(levy_exponent(m, u) - expect));
        }
    }
    ScheduleFamily f{LawKind::Bernoulli, GeneratorId::IidClassic, 1.0};
    const std::vector<double> ts = uniform_grid(kCfGridLo, kCfGridHi, kCfGridPoints);
    auto acc_dist = [&](std::int64_t kn) {
        const RowSchedule row = generate_row(f, kn, kn);
        return cf_distance(accompanying_cf_grid(row, ts), row_cf_grid(row, ts));
    };
    const double d10 = acc_dist(10);
    const double d1000 = acc_dist(1000);
    detail = "atom identity gap " + num(worst) + " (tol 1e-14); accompanying dist " +
             num(d1000) + " @1000 < " + num(d10) + " @10";
    return worst <= 1e-14 && d1000 < d10;
}

// 11. Monte Carlo consistency and reproducibility.
bool c11_monte_carlo(std::string& detail) {
    ScheduleFamily classic{LawKind::Bernoulli, GeneratorId::IidClassic, 1.0};
    ScheduleFamily linear{LawKind::Bernoulli, GeneratorId::LinearWeights, 1.0};
    ScheduleFamily geo{LawKind::CorrectedGeometric, GeneratorId::IidClassic, 1.0};
    const RowSchedule rows[] = {generate_row(classic, 20, 20),
                                generate_row(linear, 50, 50),
                                generate_row(geo, 10, 10)};
    double worst = 0.0;
    bool identical = true;
    for (const auto& row : rows) {
        const SumLaw exact = sum_law(row, 1e-12);
        const Pmf emp = simulate_row_sum(row, 1000000, 424242);
        worst = std::max(worst, tv_distance(exact.pmf, emp).lo);
        const Pmf again = simulate_row_sum(row, 1000000, 424242);
        identical = identical && emp.offset() == again.offset() &&
                    bitwise_equal(emp.masses(), again.masses());
    }
    detail = "max tv(exact, empirical 1e6) " + num(worst) +
             " (tol 0.005); same-seed reruns bitwise identical: " +
             (identical ? "yes" : "no");
    return worst <= 0.005 && identical;
}

// 12. CLI determinism and p-value correctness.
bool c12_cli(std::string& detail) {
    const std::string args =
        "pvalue --kind bernoulli --generator iid_classic --lambda 1 --kn 100 --t 3";
    const CliRun a = run_cli(args);
    const CliRun b = run_cli(args);
    if (a.exit_code != 0 || b.exit_code != 0) {
        detail = "CLI exited with " + std::to_string(a.exit_code);
        return false;
    }
    if (a.out != b.out) {
        detail = "repeated invocations differ";
        return false;
    }
    // parse "P(S>3) in [lo, hi]"
    const auto lb = a.out.find('[');
    const auto comma = a.out.find(',', lb);
    const auto rb = a.out.find(']', comma);
    if (lb == std::string::npos || comma == std::string::npos || rb == std::string::npos) {
        detail = "unexpected output: " + a.out;
        return false;
    }
    const double lo = std::stod(a.out.substr(lb + 1, comma - lb - 1));
    const double hi = std::stod(a.out.substr(comma + 1, rb - comma - 1));
    double head = 0.0;
    for (int j = 0; j <= 3; ++j) head += oracles::binomial_mass(100, 0.01, j);
    const double expect = 1.0 - head;
    const double err = std::abs(lo - expect);
    detail = "P(S>3) = " + num(lo) + ", closed form " + num(expect) + ", gap " +
             num(err) + " (tol 1e-12), byte-identical reruns: yes";
    return err <= 1e-12 && hi == lo;
}

} // namespace

int main() {
    std::printf("poislim acceptance suite\n");
    criterion(1, "Poisson-binomial DP vs exhaustive enumeration", c1_enumeration_oracle);
    criterion(2, "DP vs CF-transform cross-method agreement", c2_cross_method);
    criterion(3, "geometric_sum vs shifted negative binomial", c3_geometric_oracle);
    criterion(4, "classical binomial regime converges to P(1)", c4_binomial_regime);
    criterion(5, "shifted negative-binomial regime converges to P(1)", c5_shifted_nb_regime);
    criterion(6, "T1 regime: linear-weight Bernoulli schedule", c6_theorem1);
    criterion(7, "T2 regime: linear-weight geometric schedule", c7_theorem2);
    criterion(8, "Lindeberg-Poisson equals B functionals", c8_lindeberg_identity);
    criterion(9, "Lindeberg-Poisson vanishing under classical envelope", c9_lindeberg_vanishing);
    criterion(10, "Levy exponent identities and accompanying law", c10_levy);
    criterion(11, "Monte Carlo consistency and reproducibility", c11_monte_carlo);
    criterion(12, "CLI determinism and p-value correctness", c12_cli);
    if (failures == 0)
        std::printf("all 12 criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures;
}
