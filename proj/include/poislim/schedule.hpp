#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "poislim/distributions.hpp"

namespace poislim {

/// One row of the triangular array: the law kind plus the per-cell parameters
/// p_{k,n}, k = 1..k(n). For geometric rows the constrained quantities are the
/// q_{k,n} = 1 - p_{k,n}; only p is stored.
struct RowSchedule {
    LawKind kind;
    std::vector<double> params;
    std::int64_t n_index = 1;

    RowSchedule(LawKind k, std::vector<double> p, std::int64_t n)
        : kind(k), params(std::move(p)), n_index(n) {
        if (params.empty())
            throw std::invalid_argument("RowSchedule: row must have at least one cell");
        for (std::size_t i = 0; i < params.size(); ++i)
            if (!(params[i] > 0.0 && params[i] < 1.0))
                throw std::invalid_argument(
                    "RowSchedule: parameter at cell k=" + std::to_string(i + 1) +
                    " is " + std::to_string(params[i]) + ", outside (0,1)");
    }

    std::int64_t kn() const { return static_cast<std::int64_t>(params.size()); }
    CellLaw cell(std::size_t k) const { return CellLaw(kind, params[k]); }
};

inline RowMoments row_moments(const RowSchedule& row) {
    return row_moments(row.kind, row.params);
}

namespace detail {
inline void require_kind(const RowSchedule& row, LawKind kind, const char* where) {
    if (row.kind != kind)
        throw std::invalid_argument(std::string(where) + ": row kind is " +
                                    law_kind_name(row.kind) + ", expected " +
                                    law_kind_name(kind));
}
} // namespace detail

enum class GeneratorId { IidClassic, LinearWeights, PowerWeights, PerturbedIid, Explicit };

inline const char* generator_name(GeneratorId g) {
    switch (g) {
        case GeneratorId::IidClassic: return "iid_classic";
        case GeneratorId::LinearWeights: return "linear_weights";
        case GeneratorId::PowerWeights: return "power_weights";
        case GeneratorId::PerturbedIid: return "perturbed_iid";
        case GeneratorId::Explicit: return "explicit";
    }
    return "?";
}

/// A deterministic family of row schedules. For kind = bernoulli the
/// generators produce the p_{k,n} directly; for kind = geometric they produce
/// the theorem-constrained q_{k,n} and store p = 1 - q.
///
/// Weight laws (w_k sums to 1 over k = 1..kn):
///   iid_classic     w_k = 1/kn
///   linear_weights  w_k = 2k / (kn (kn+1))
///   power_weights   w_k = k^gamma / sum_i i^gamma
///   perturbed_iid   w_k = (1 + delta cos(2 pi k / kn)) / kn   (sum is exactly kn/kn)
/// The generated parameter is lambda * w_k. `explicit` carries a fixed row.
struct ScheduleFamily {
    LawKind kind = LawKind::Bernoulli;
    GeneratorId generator = GeneratorId::IidClassic;
    double lambda = 0.0;
    double gamma = 0.0;  // power_weights exponent
    double delta = 0.0;  // perturbed_iid amplitude, in [0, 1)
    std::vector<double> explicit_params;

    friend bool operator==(const ScheduleFamily&, const ScheduleFamily&) = default;
};

namespace detail {
inline double family_weight(const ScheduleFamily& f, std::int64_t k, std::int64_t kn,
                            double power_norm) {
    switch (f.generator) {
        case GeneratorId::IidClassic:
            return 1.0 / static_cast<double>(kn);
        case GeneratorId::LinearWeights:
            return 2.0 * static_cast<double>(k) /
                   (static_cast<double>(kn) * static_cast<double>(kn + 1));
        case GeneratorId::PowerWeights:
            return std::pow(static_cast<double>(k), f.gamma) / power_norm;
        case GeneratorId::PerturbedIid:
            return (1.0 + f.delta * std::cos(2.0 * std::numbers::pi *
                                             static_cast<double>(k) /
                                             static_cast<double>(kn))) /
                   static_cast<double>(kn);
        case GeneratorId::Explicit:
            break;
    }
    throw std::logic_error("family_weight: explicit family has no weight law");
}
} // namespace detail

/// Materialize row n with kn cells. Deterministic: identical inputs give a
/// bit-identical schedule. A parameter escaping (0,1) is rejected with the
/// offending cell index.
inline RowSchedule generate_row(const ScheduleFamily& f, std::int64_t n, std::int64_t kn) {
    if (kn < 1) throw std::invalid_argument("generate_row: kn must be >= 1");
    if (f.generator == GeneratorId::Explicit) {
        if (kn != static_cast<std::int64_t>(f.explicit_params.size()))
            throw std::invalid_argument(
                "generate_row: explicit schedule has " +
                std::to_string(f.explicit_params.size()) + " cells, not kn=" +
                std::to_string(kn));
        return RowSchedule(f.kind, f.explicit_params, n);
    }
    if (!(f.lambda > 0.0))
        throw std::invalid_argument("generate_row: lambda must be positive");
    if (f.generator == GeneratorId::PerturbedIid && !(f.delta >= 0.0 && f.delta < 1.0))
        throw std::invalid_argument("generate_row: delta must lie in [0,1)");
    double power_norm = 1.0;
    if (f.generator == GeneratorId::PowerWeights) {
        power_norm = 0.0;
        for (std::int64_t k = 1; k <= kn; ++k)
            power_norm += std::pow(static_cast<double>(k), f.gamma);
    }
    std::vector<double> params(static_cast<std::size_t>(kn));
    for (std::int64_t k = 1; k <= kn; ++k) {
        const double v = f.lambda * detail::family_weight(f, k, kn, power_norm);
        if (!(v > 0.0 && v < 1.0))
            throw std::invalid_argument(
                "generate_row: generated parameter at cell k=" + std::to_string(k) +
                " is " + std::to_string(v) + ", outside (0,1); increase kn");
        params[static_cast<std::size_t>(k - 1)] =
            f.kind == LawKind::Bernoulli ? v : 1.0 - v;
    }
    return RowSchedule(f.kind, std::move(params), n);
}

/// Schedule config format: one `key = value` pair per line, `#` starts a
/// comment, blank lines ignored. Keys: kind (bernoulli|geometric), generator
/// (iid_classic|linear_weights|power_weights|perturbed_iid|explicit), lambda,
/// gamma, delta (reals), params (comma-separated reals, explicit only).
/// Parsing is byte-deterministic; errors carry line and field diagnostics.
inline ScheduleFamily parse_schedule(std::string_view text) {
    ScheduleFamily f;
    bool saw_kind = false, saw_generator = false, saw_lambda = false, saw_params = false;

    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        return s;
    };
    auto fail = [](std::size_t line, const std::string& what) -> void {
        throw std::invalid_argument("schedule config line " + std::to_string(line) +
                                    ": " + what);
    };
    auto parse_real = [&](std::string_view v, std::size_t line, const char* field) {
        double out = 0.0;
        const char* first = v.data();
        const char* last = v.data() + v.size();
        auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc() || ptr != last)
            fail(line, std::string("field '") + field + "' has malformed real '" +
                           std::string(v) + "'");
        return out;
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (pos > text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail(line_no, "expected 'key = value', got '" + std::string(line) + "'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (value.empty()) fail(line_no, "field '" + std::string(key) + "' has no value");

        if (key == "kind") {
            if (value == "bernoulli") f.kind = LawKind::Bernoulli;
            else if (value == "geometric") f.kind = LawKind::CorrectedGeometric;
            else fail(line_no, "unknown kind '" + std::string(value) + "'");
            saw_kind = true;
        } else if (key == "generator") {
            if (value == "iid_classic") f.generator = GeneratorId::IidClassic;
            else if (value == "linear_weights") f.generator = GeneratorId::LinearWeights;
            else if (value == "power_weights") f.generator = GeneratorId::PowerWeights;
            else if (value == "perturbed_iid") f.generator = GeneratorId::PerturbedIid;
            else if (value == "explicit") f.generator = GeneratorId::Explicit;
            else fail(line_no, "unknown generator '" + std::string(value) + "'");
            saw_generator = true;
        } else if (key == "lambda") {
            f.lambda = parse_real(value, line_no, "lambda");
            saw_lambda = true;
        } else if (key == "gamma") {
            f.gamma = parse_real(value, line_no, "gamma");
        } else if (key == "delta") {
            f.delta = parse_real(value, line_no, "delta");
        } else if (key == "params") {
            std::string_view rest = value;
            std::size_t index = 0;
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                std::string_view item = trim(rest.substr(0, comma));
                rest = comma == std::string_view::npos ? std::string_view{}
                                                       : rest.substr(comma + 1);
                ++index;
                if (item.empty())
                    fail(line_no, "params entry " + std::to_string(index) + " is empty");
                const double p =
                    parse_real(item, line_no,
                               ("params[" + std::to_string(index) + "]").c_str());
                if (!(p > 0.0 && p < 1.0))
                    fail(line_no, "params entry " + std::to_string(index) + " is " +
                                      std::string(item) + ", outside (0,1)");
                f.explicit_params.push_back(p);
            }
            saw_params = true;
        } else {
            fail(line_no, "unknown field '" + std::string(key) + "'");
        }
        if (pos > text.size()) break;
    }

    if (!saw_kind) throw std::invalid_argument("schedule config: missing field 'kind'");
    if (!saw_generator)
        throw std::invalid_argument("schedule config: missing field 'generator'");
    if (f.generator == GeneratorId::Explicit) {
        if (!saw_params)
            throw std::invalid_argument("schedule config: explicit generator needs 'params'");
    } else {
        if (!saw_lambda)
            throw std::invalid_argument("schedule config: missing field 'lambda'");
        if (!(f.lambda > 0.0))
            throw std::invalid_argument("schedule config: lambda must be positive");
        if (saw_params)
            throw std::invalid_argument("schedule config: 'params' is only valid with "
                                        "generator = explicit");
    }
    return f;
}

/// Canonical emitter; parse(emit(f)) == f.
inline std::string emit_schedule(const ScheduleFamily& f) {
    std::ostringstream out;
    out.precision(17);
    out << "kind = " << law_kind_name(f.kind) << '\n';
    out << "generator = " << generator_name(f.generator) << '\n';
    if (f.generator == GeneratorId::Explicit) {
        out << "params = ";
        for (std::size_t i = 0; i < f.explicit_params.size(); ++i)
            out << (i ? ", " : "") << f.explicit_params[i];
        out << '\n';
    } else {
        out << "lambda = " << f.lambda << '\n';
        if (f.generator == GeneratorId::PowerWeights) out << "gamma = " << f.gamma << '\n';
        if (f.generator == GeneratorId::PerturbedIid) out << "delta = " << f.delta << '\n';
    }
    return out.str();
}

} // namespace poislim
