#include "stepreg/partitions.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "stepreg/errors.hpp"

namespace stepreg {

std::vector<int> Partition::widths() const {
    std::vector<int> w;
    w.reserve(splits.size() + 1);
    int prev = 0;
    for (int j : splits) {
        w.push_back(j - prev);
        prev = j;
    }
    w.push_back(n - prev);
    return w;
}

Partition make_partition(int n, std::vector<int> splits, PartitionKind kind) {
    if (n < 1) throw std::invalid_argument("make_partition: n must be >= 1");
    int prev = 0;
    for (int j : splits) {
        if (j <= prev || j >= n)
            throw std::invalid_argument("make_partition: splits must be strictly increasing in {1,...,n-1}");
        prev = j;
    }
    Partition p{n, std::move(splits), kind};
    if (kind == PartitionKind::EquivalentBlock) {
        const int K = p.cells();
        if (n % K != 0) throw std::invalid_argument("make_partition: equivalent blocks need K | n");
        for (int k = 1; k < K; ++k)
            if (p.splits[k - 1] != k * (n / K))
                throw std::invalid_argument("make_partition: splits are not equivalent blocks");
    }
    return p;
}

BalanceConstraint::BalanceConstraint(Rat cmin_sq, Rat cmax_sq)
    : c_min_sq(cmin_sq), c_max_sq(cmax_sq) {
    const Rat zero(0, 1), one(1, 1);
    if (!(cmp(zero, c_min_sq) < 0 && cmp(c_min_sq, one) <= 0 && cmp(one, c_max_sq) <= 0))
        throw std::invalid_argument("BalanceConstraint: need 0 < c_min_sq <= 1 <= c_max_sq");
}

BalanceConstraint::BalanceConstraint(double cmin_sq, double cmax_sq)
    : BalanceConstraint(rat_from_double(cmin_sq), rat_from_double(cmax_sq)) {}

BalanceConstraint min_width_constraint(int n, int K, int a) {
    if (a < 1 || static_cast<long long>(a) * K > n)
        throw std::invalid_argument("min_width_constraint: need 1 <= a <= n/K");
    // c_min_sq / K = a / n, upper bound vacuous (mu <= 1 <= c_max_sq/K).
    return BalanceConstraint(Rat(static_cast<long long>(a) * K, n), Rat(K, 1));
}

WidthBounds balanced_width_bounds(int n, int K, const BalanceConstraint& bc) {
    // w/n >= cmin/K  <=>  w >= ceil(n*cmin/K); w/n <= cmax/K likewise.
    const __int128 lo_num = static_cast<__int128>(n) * bc.c_min_sq.num;
    const __int128 lo_den = static_cast<__int128>(K) * bc.c_min_sq.den;
    const __int128 hi_num = static_cast<__int128>(n) * bc.c_max_sq.num;
    const __int128 hi_den = static_cast<__int128>(K) * bc.c_max_sq.den;
    WidthBounds b;
    b.lo = static_cast<long>((lo_num + lo_den - 1) / lo_den);
    b.hi = static_cast<long>(hi_num / hi_den);
    if (b.lo < 1) b.lo = 1;
    if (b.hi > n) b.hi = n;
    return b;
}

Partition equivalent_blocks(int n, int K, bool nearly_equal) {
    if (n < 1 || K < 1 || K > n) throw std::invalid_argument("equivalent_blocks: need 1 <= K <= n");
    if (n % K != 0 && !nearly_equal)
        throw std::domain_error("equivalent_blocks: K does not divide n");
    std::vector<int> splits;
    splits.reserve(K - 1);
    if (n % K == 0) {
        const int c = n / K;
        for (int k = 1; k < K; ++k) splits.push_back(k * c);
        return Partition{n, std::move(splits), PartitionKind::EquivalentBlock};
    }
    // Remainder spread over the leftmost cells.
    const int base = n / K, rem = n % K;
    int pos = 0;
    for (int k = 1; k < K; ++k) {
        pos += base + (k <= rem ? 1 : 0);
        splits.push_back(pos);
    }
    return Partition{n, std::move(splits), PartitionKind::BalancedInterval};
}

std::vector<double> cell_counts(const Partition& p, const Grid& grid) {
    if (p.n != grid.n) throw std::invalid_argument("cell_counts: partition and grid disagree on n");
    std::vector<double> mu;
    for (int w : p.widths()) mu.push_back(static_cast<double>(w) / p.n);
    return mu;
}

bool is_balanced(const Partition& p, const BalanceConstraint& bc, const Grid& grid) {
    if (p.n != grid.n) throw std::invalid_argument("is_balanced: partition and grid disagree on n");
    const WidthBounds b = balanced_width_bounds(p.n, p.cells(), bc);
    if (b.empty()) return false;
    for (int w : p.widths())
        if (w < b.lo || w > b.hi) return false;
    return true;
}

PartitionEnumerator::PartitionEnumerator(int n, int K, std::optional<BalanceConstraint> bc)
    : n_(n), K_(K) {
    if (n < 1 || K < 1) throw std::invalid_argument("PartitionEnumerator: need n >= 1, K >= 1");
    if (K > n) throw std::invalid_argument("PartitionEnumerator: K > n");
    if (bc) bounds_ = balanced_width_bounds(n, K, *bc);
    current_.resize(K - 1);
    std::iota(current_.begin(), current_.end(), 1);
}

bool PartitionEnumerator::admissible() const {
    if (!bounds_) return true;
    if (bounds_->empty()) return false;
    int prev = 0;
    for (int j : current_) {
        const int w = j - prev;
        if (w < bounds_->lo || w > bounds_->hi) return false;
        prev = j;
    }
    const int w = n_ - prev;
    return w >= bounds_->lo && w <= bounds_->hi;
}

std::optional<Partition> PartitionEnumerator::next() {
    const int m = K_ - 1;
    while (!done_) {
        if (first_) {
            first_ = false;
            if (m > n_ - 1) {
                done_ = true;
                break;
            }
        } else {
            // Advance in colex order: bump the lowest position that has room
            // before its successor, resetting everything below it.
            int i = 0;
            for (; i < m; ++i) {
                const int cap = (i + 1 < m) ? current_[i + 1] : n_;
                if (current_[i] + 1 < cap) break;
            }
            if (i == m) {
                done_ = true;
                break;
            }
            ++current_[i];
            std::iota(current_.begin(), current_.begin() + i, 1);
        }
        if (admissible())
            return Partition{n_, current_, PartitionKind::BalancedInterval};
    }
    return std::nullopt;
}

std::vector<Partition> enumerate_partitions(int n, int K, std::optional<BalanceConstraint> bc) {
    std::vector<Partition> out;
    PartitionEnumerator en(n, K, bc);
    while (auto p = en.next()) out.push_back(std::move(*p));
    return out;
}

namespace {
BigInt binom_small(long a, long b) {
    if (b < 0 || a < 0 || b > a) return 0;
    if (b > a - b) b = a - b;
    BigInt r = 1;
    for (long i = 1; i <= b; ++i) {
        r *= (a - b + i);
        r /= i;
    }
    return r;
}
}  // namespace

BigInt count_balanced(int n, int K, std::optional<BalanceConstraint> bc) {
    if (n < 1 || K < 1) throw std::invalid_argument("count_balanced: need n >= 1, K >= 1");
    if (K > n) throw std::invalid_argument("count_balanced: K > n");
    if (!bc) return binom_small(n - 1, K - 1);
    const WidthBounds b = balanced_width_bounds(n, K, *bc);
    if (b.empty()) return 0;
    // Compositions of n into K parts in [lo, hi]: shift to v_k = w_k - lo,
    // cap R = hi - lo, then count by inclusion-exclusion over capped parts.
    const long M = n - K * b.lo;
    if (M < 0) return 0;
    const long R = b.hi - b.lo;
    BigInt total = 0;
    for (long j = 0; j <= K; ++j) {
        const long rem = M - j * (R + 1);
        if (rem < 0) break;
        const BigInt term = binom_small(K, j) * binom_small(rem + K - 1, K - 1);
        total += (j % 2 == 0) ? term : -term;
    }
    return total;
}

Partition sample_uniform_splits(int n, int K, Rng& rng) {
    if (K < 1 || K > n) throw std::invalid_argument("sample_uniform_splits: need 1 <= K <= n");
    const int m = K - 1;
    std::vector<int> pool(n - 1);
    std::iota(pool.begin(), pool.end(), 1);
    for (int i = 0; i < m; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1 - i)));
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> splits(pool.begin(), pool.begin() + m);
    std::sort(splits.begin(), splits.end());
    return Partition{n, std::move(splits), PartitionKind::BalancedInterval};
}

BalancedDraw sample_balanced_partition(int n, int K, const BalanceConstraint& bc, Rng& rng,
                                       long max_attempts) {
    if (count_balanced(n, K, bc) == 0)
        throw NoBalancedPartitionError("sample_balanced_partition: empty balanced set for n=" +
                                       std::to_string(n) + ", K=" + std::to_string(K));
    const Grid grid = make_grid(n);
    for (long attempt = 1; attempt <= max_attempts; ++attempt) {
        Partition p = sample_uniform_splits(n, K, rng);
        if (is_balanced(p, bc, grid)) return BalancedDraw{std::move(p), attempt};
    }
    throw TooLargeError("sample_balanced_partition: attempt cap reached");
}

}  // namespace stepreg
