#include "stepreg/complexity.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "stepreg/errors.hpp"

namespace stepreg {

int restricted_cell_count(const Rat& lo, const Rat& hi, const StepFunction& f0) {
    const Rat zero(0, 1), one(1, 1);
    if (cmp(lo, hi) >= 0) throw std::invalid_argument("restricted_cell_count: empty interval");
    if (cmp(lo, zero) < 0 || cmp(hi, one) > 0)
        throw std::invalid_argument("restricted_cell_count: interval must lie in (0,1]");
    // (a,b] and (c,d] intersect iff max(a,c) < min(b,d).
    const auto& bps = f0.breakpoints();
    int count = 0;
    Rat left = zero;
    for (int k = 0; k <= static_cast<int>(bps.size()); ++k) {
        const Rat right = (k < static_cast<int>(bps.size())) ? bps[k] : one;
        const Rat a = cmp(left, lo) > 0 ? left : lo;
        const Rat b = cmp(right, hi) < 0 ? right : hi;
        if (cmp(a, b) < 0) ++count;
        left = right;
    }
    return count;
}

ComplexityResult complexity_eb(const StepFunction& f0, int /*n*/, int cap) {
    if (cap < 1) throw std::invalid_argument("complexity_eb: cap must be >= 1");
    const auto& bps = f0.breakpoints();
    for (int K = 1; K <= cap; ++K) {
        bool ok = true;
        for (const Rat& b : bps)
            if (!is_integer_multiple(b, K)) {
                ok = false;
                break;
            }
        if (ok) {
            ComplexityResult r;
            r.k = K;
            r.cap = cap;
            for (int j = 1; j < K; ++j) r.witness.emplace_back(j, K);
            return r;
        }
    }
    return ComplexityResult{std::nullopt, cap, {}};
}

namespace {

// Grid index of a breakpoint, or nullopt if b*n is not an integer.
std::optional<long long> grid_index(const Rat& b, int n) {
    const __int128 p = static_cast<__int128>(b.num) * n;
    if (p % b.den != 0) return std::nullopt;
    return static_cast<long long>(p / b.den);
}

}  // namespace

ComplexityResult complexity_bi(const StepFunction& f0, int n, const BalanceConstraint& bc,
                               int cap) {
    if (n < 1) throw std::invalid_argument("complexity_bi: n must be >= 1");
    if (cap < 1) throw std::invalid_argument("complexity_bi: cap must be >= 1");
    // True cell widths in grid units.
    std::vector<long> w;
    long prev = 0;
    for (const Rat& b : f0.breakpoints()) {
        const auto j = grid_index(b, n);
        if (!j)
            throw OffGridError("complexity_bi: breakpoint " + to_string(b) +
                               " is not on the n=" + std::to_string(n) + " grid");
        w.push_back(static_cast<long>(*j - prev));
        prev = static_cast<long>(*j);
    }
    w.push_back(n - prev);
    const int k0 = static_cast<int>(w.size());

    for (int K = k0; K <= cap; ++K) {
        const WidthBounds b = balanced_width_bounds(n, K, bc);
        if (b.empty()) continue;
        // True cell t split into m_t balanced cells is possible iff
        // m_t*lo <= w_t <= m_t*hi; feasibility over t is an interval in K.
        long sum_lo = 0, sum_hi = 0;
        bool ok = true;
        std::vector<long> m_lo(k0), m_hi(k0);
        for (int t = 0; t < k0; ++t) {
            m_lo[t] = std::max(1L, (w[t] + b.hi - 1) / b.hi);
            m_hi[t] = w[t] / b.lo;
            if (m_lo[t] > m_hi[t]) {
                ok = false;
                break;
            }
            sum_lo += m_lo[t];
            sum_hi += m_hi[t];
        }
        if (!ok || K < sum_lo || K > sum_hi) continue;

        // Build a witness: start at the lower counts, hand out the surplus.
        std::vector<long> m = m_lo;
        long surplus = K - sum_lo;
        for (int t = 0; t < k0 && surplus > 0; ++t) {
            const long add = std::min(surplus, m_hi[t] - m_lo[t]);
            m[t] += add;
            surplus -= add;
        }
        ComplexityResult r;
        r.k = K;
        r.cap = cap;
        long pos = 0;
        for (int t = 0; t < k0; ++t) {
            // m[t] near-equal integer parts of w[t]; all land inside [lo, hi].
            const long base = w[t] / m[t], rem = w[t] % m[t];
            for (long i = 0; i < m[t]; ++i) {
                pos += base + (i < rem ? 1 : 0);
                if (pos < n) r.witness.emplace_back(pos, n);
            }
        }
        return r;
    }
    return ComplexityResult{std::nullopt, cap, {}};
}

StepFunction best_l2_approx(const StepFunction& f0, const Partition& p, const Grid& grid) {
    if (p.n != grid.n) throw std::invalid_argument("best_l2_approx: partition and grid disagree on n");
    const std::vector<double> f = f0.values_on_grid(grid);
    std::vector<double> heights;
    heights.reserve(p.cells());
    int lo = 0;
    auto flush = [&](int hi) {
        bool constant = true;
        for (int i = lo + 1; i < hi && constant; ++i) constant = (f[i] == f[lo]);
        if (constant) {
            heights.push_back(f[lo]);  // exact on cells inside one true cell
        } else {
            double s = 0.0;
            for (int i = lo; i < hi; ++i) s += f[i];
            heights.push_back(s / (hi - lo));
        }
        lo = hi;
    };
    for (int j : p.splits) flush(j);
    flush(p.n);
    return StepFunction::on_grid(p.n, p.splits, std::move(heights));
}

}  // namespace stepreg
