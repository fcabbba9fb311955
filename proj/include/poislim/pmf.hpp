#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace poislim {

/// Finite lattice probability mass function.
///
/// `offset` is the smallest represented support point, `masses[i]` the mass at
/// `offset + i`, and `tail` a certified upper bound on the mass lying beyond
/// the represented support. Every constructor enforces
///
///   masses[i] >= 0,  tail >= 0,  |sum(masses) + tail - 1| <= 1e-9,
///
/// and canonical trimming: no leading or trailing zero entries (except for the
/// degenerate single-entry case). Values are immutable after construction.
class Pmf {
public:
    Pmf(std::int64_t offset, std::vector<double> masses, double tail)
        : offset_(offset), masses_(std::move(masses)), tail_(tail) {
        if (masses_.empty())
            throw std::invalid_argument("Pmf: empty mass vector");
        for (double m : masses_)
            if (!(m >= 0.0))
                throw std::invalid_argument("Pmf: negative or NaN mass");
        if (!(tail_ >= 0.0))
            throw std::invalid_argument("Pmf: negative or NaN tail");
        // canonical trimming: strip exact zeros at both ends
        std::size_t lead = 0;
        while (lead + 1 < masses_.size() && masses_[lead] == 0.0) ++lead;
        std::size_t len = masses_.size();
        while (len > lead + 1 && masses_[len - 1] == 0.0) --len;
        if (lead > 0 || len < masses_.size()) {
            masses_.assign(masses_.begin() + static_cast<std::ptrdiff_t>(lead),
                           masses_.begin() + static_cast<std::ptrdiff_t>(len));
            offset_ += static_cast<std::int64_t>(lead);
        }
        const double total = mass_sum() + tail_;
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("Pmf: masses + tail sum to " +
                                        std::to_string(total) + ", not 1");
    }

    static Pmf point_mass(std::int64_t j) { return Pmf(j, {1.0}, 0.0); }

    std::int64_t offset() const { return offset_; }
    const std::vector<double>& masses() const { return masses_; }
    double tail() const { return tail_; }

    /// Largest represented support point.
    std::int64_t support_end() const {
        return offset_ + static_cast<std::int64_t>(masses_.size()) - 1;
    }

    /// Mass at lattice point j; zero outside the represented support.
    double at(std::int64_t j) const {
        if (j < offset_ || j > support_end()) return 0.0;
        return masses_[static_cast<std::size_t>(j - offset_)];
    }

    /// Sum of represented masses at points <= j (tail not included).
    double cdf(std::int64_t j) const {
        if (j < offset_) return 0.0;
        const std::int64_t hi = std::min(j, support_end());
        double s = 0.0;
        for (std::int64_t i = offset_; i <= hi; ++i)
            s += masses_[static_cast<std::size_t>(i - offset_)];
        return s;
    }

    double mass_sum() const {
        return std::accumulate(masses_.begin(), masses_.end(), 0.0);
    }

    /// Mean of the represented part. Truncation shifts this by at most
    /// tail * max|j| over the trimmed region; callers budget for that.
    double mean() const {
        double s = 0.0;
        for (std::size_t i = 0; i < masses_.size(); ++i)
            s += static_cast<double>(offset_ + static_cast<std::int64_t>(i)) * masses_[i];
        return s;
    }

    /// Variance of the represented part (two-pass, centered accumulation).
    double variance() const {
        const double m = mean();
        double s = 0.0;
        for (std::size_t i = 0; i < masses_.size(); ++i) {
            const double d = static_cast<double>(offset_ + static_cast<std::int64_t>(i)) - m;
            s += d * d * masses_[i];
        }
        return s;
    }

private:
    std::int64_t offset_;
    std::vector<double> masses_;
    double tail_;
};

/// Exact convolution of two finite PMFs. The result's tail is the residual
/// 1 - sum(masses), which is bounded by a.tail + b.tail.
inline Pmf convolve(const Pmf& a, const Pmf& b) {
    const auto& am = a.masses();
    const auto& bm = b.masses();
    std::vector<double> out(am.size() + bm.size() - 1, 0.0);
    for (std::size_t i = 0; i < am.size(); ++i) {
        if (am[i] == 0.0) continue;
        for (std::size_t j = 0; j < bm.size(); ++j)
            out[i + j] += am[i] * bm[j];
    }
    double s = std::accumulate(out.begin(), out.end(), 0.0);
    return Pmf(a.offset() + b.offset(), std::move(out), std::max(0.0, 1.0 - s));
}

} // namespace poislim
