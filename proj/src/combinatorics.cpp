#include "stepreg/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "stepreg/errors.hpp"

namespace stepreg {

double ExactProbability::value() const {
    using Float = boost::multiprecision::cpp_bin_float_quad;
    return static_cast<double>(Float(num) / Float(den));
}

ExactProbability make_probability(BigInt num, BigInt den, bool snapped) {
    if (den <= 0) throw std::invalid_argument("make_probability: denominator must be positive");
    if (num < 0 || num > den) throw std::invalid_argument("make_probability: value outside [0,1]");
    const BigInt g = boost::multiprecision::gcd(num, den);
    return ExactProbability{num / g, den / g, snapped};
}

BigInt binom(const BigInt& a, const BigInt& b) {
    if (b < 0 || a < 0 || b > a) return 0;
    BigInt k = b;
    if (k > a - k) k = a - k;
    BigInt r = 1;
    for (BigInt i = 1; i <= k; ++i) {
        r *= a - k + i;
        r /= i;
    }
    return r;
}

double log_binom(double a, double b) {
    if (b < 0 || a < 0 || b > a) return -std::numeric_limits<double>::infinity();
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

double log_big(const BigInt& x) {
    if (x <= 0) return -std::numeric_limits<double>::infinity();
    const unsigned bits = boost::multiprecision::msb(x);
    if (bits <= 52) return std::log(static_cast<double>(x));
    const unsigned shift = bits - 52;
    const double top = static_cast<double>(x >> shift);
    return std::log(top) + shift * M_LN2;
}

namespace {

// Smallest integer a with a/n >= C, clamped to >= 1 (widths are >= 1/n).
long ceil_grid(int n, const Rat& C, bool& snapped) {
    const __int128 p = static_cast<__int128>(C.num) * n;
    snapped = (p % C.den) != 0;
    __int128 a = (p + C.den - 1) / C.den;  // C > 0 in all callers
    if (a < 1) {
        a = 1;
        snapped = false;  // event unchanged: every width is >= 1/n
    }
    return static_cast<long>(a);
}

long floor_grid(int n, const Rat& C, bool& snapped) {
    const __int128 p = static_cast<__int128>(C.num) * n;
    snapped = (p % C.den) != 0;
    const __int128 a = p >= 0 ? p / C.den : -((-p + C.den - 1) / C.den);
    return static_cast<long>(a);
}

void check_spacing_args(int n, int K) {
    if (K < 1) throw std::invalid_argument("spacing probability: K must be >= 1");
    if (n < K) throw std::invalid_argument("spacing probability: need n >= K");
}

}  // namespace

ExactProbability prob_min_cell(int n, int K, const Rat& C) {
    check_spacing_args(n, K);
    if (C.num <= 0) return make_probability(1, 1);
    bool snapped = false;
    const long a = ceil_grid(n, C, snapped);
    const BigInt num = binom(n - static_cast<long long>(K) * a + K - 1, K - 1);
    const BigInt den = binom(n - 1, K - 1);
    return make_probability(num, den, snapped);
}

ExactProbability prob_max_cell(int n, int K, const Rat& C) {
    check_spacing_args(n, K);
    bool snapped = false;
    const long a = floor_grid(n, C, snapped);
    const BigInt den = binom(n - 1, K - 1);
    if (a < 1) return make_probability(0, den > 0 ? den : 1, snapped);
    BigInt num = 0;
    for (long j = 0; j <= K; ++j) {
        const long long top = n - static_cast<long long>(j) * a - 1;
        const BigInt term = binom(K, j) * binom(top, K - 1);
        num += (j % 2 == 0) ? term : -term;
    }
    return make_probability(num, den, snapped);
}

SpacingProbs brute_force_spacing_probs(int n, int K, const Rat& C, long long max_subsets) {
    check_spacing_args(n, K);
    const BigInt total = binom(n - 1, K - 1);
    if (total > max_subsets)
        throw TooLargeError("brute_force_spacing_probs: C(n-1,K-1) exceeds the guard");
    BigInt min_ok = 0, max_ok = 0;
    PartitionEnumerator en(n, K);
    while (auto p = en.next()) {
        int wmin = n, wmax = 0;
        for (int w : p->widths()) {
            wmin = std::min(wmin, w);
            wmax = std::max(wmax, w);
        }
        if (cmp_frac(wmin, n, C.num, C.den) >= 0) ++min_ok;
        if (cmp_frac(wmax, n, C.num, C.den) <= 0) ++max_ok;
    }
    return SpacingProbs{make_probability(min_ok, total), make_probability(max_ok, total)};
}

namespace {

// Closed arcs of a = floor(n * len) grid units starting at the chosen
// points cover the circle iff no cyclic gap between consecutive starting
// points exceeds a.
bool covers(const std::vector<int>& sorted_points, int n, long a) {
    const int k = static_cast<int>(sorted_points.size());
    for (int i = 0; i + 1 < k; ++i)
        if (sorted_points[i + 1] - sorted_points[i] > a) return false;
    return n - sorted_points[k - 1] + sorted_points[0] <= a;
}

}  // namespace

CoverEstimate circle_cover_mc(int n, int K, const Rat& arc_length, long trials,
                              std::uint64_t seed) {
    if (n < 1 || K < 1 || K > n)
        throw std::invalid_argument("circle_cover_mc: need 1 <= K <= n");
    if (trials < 1) throw std::invalid_argument("circle_cover_mc: trials must be >= 1");
    bool snapped = false;
    const long a = floor_grid(n, arc_length, snapped);
    Rng rng(seed);
    std::vector<int> pool(n), pts(K);
    long hits = 0;
    for (long t = 0; t < trials; ++t) {
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < K; ++i) {
            const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
            std::swap(pool[i], pool[j]);
            pts[i] = pool[i];
        }
        std::sort(pts.begin(), pts.end());
        if (a >= 1 && covers(pts, n, a)) ++hits;
    }
    CoverEstimate est;
    est.trials = trials;
    est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
    return est;
}

ExactProbability circle_cover_exact(int n, int K, const Rat& arc_length,
                                    long long max_subsets) {
    if (n < 1 || K < 1 || K > n)
        throw std::invalid_argument("circle_cover_exact: need 1 <= K <= n");
    const BigInt total = binom(n, K);
    if (total > max_subsets)
        throw TooLargeError("circle_cover_exact: C(n,K) exceeds the guard");
    bool snapped = false;
    const long a = floor_grid(n, arc_length, snapped);
    BigInt hits = 0;
    std::vector<int> pts(K);
    std::iota(pts.begin(), pts.end(), 0);
    for (;;) {
        if (a >= 1 && covers(pts, n, a)) ++hits;
        int i = K - 1;
        while (i >= 0 && pts[i] == n - K + i) --i;
        if (i < 0) break;
        ++pts[i];
        for (int j = i + 1; j < K; ++j) pts[j] = pts[j - 1] + 1;
    }
    return make_probability(hits, total, snapped);
}

}  // namespace stepreg
