#include "stepreg/rational.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace stepreg {

Rat::Rat(long long n, long long d) {
    if (d == 0) throw std::invalid_argument("Rat: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const long long g = std::gcd(n < 0 ? -n : n, d);
    num = (g != 0) ? n / g : 0;
    den = (g != 0) ? d / g : 1;
}

int cmp_frac(long long p1, long long q1, long long p2, long long q2) {
    const __int128 lhs = static_cast<__int128>(p1) * q2;
    const __int128 rhs = static_cast<__int128>(p2) * q1;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

int cmp(const Rat& a, const Rat& b) {
    return cmp_frac(a.num, a.den, b.num, b.den);
}

namespace {
Rat from_i128(__int128 n, __int128 d) {
    if (d < 0) {
        n = -n;
        d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
        const __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a != 0) {
        n /= a;
        d /= a;
    }
    constexpr __int128 lim = static_cast<__int128>(1) << 62;
    if (n >= lim || n <= -lim || d >= lim)
        throw std::overflow_error("Rat: arithmetic overflow");
    return Rat(static_cast<long long>(n), static_cast<long long>(d));
}
}  // namespace

Rat operator+(const Rat& a, const Rat& b) {
    return from_i128(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                     static_cast<__int128>(a.den) * b.den);
}

Rat operator-(const Rat& a, const Rat& b) {
    return from_i128(static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den,
                     static_cast<__int128>(a.den) * b.den);
}

Rat operator*(const Rat& a, const Rat& b) {
    return from_i128(static_cast<__int128>(a.num) * b.num,
                     static_cast<__int128>(a.den) * b.den);
}

bool is_integer_multiple(const Rat& x, long long k) {
    return (static_cast<__int128>(x.num) * k) % x.den == 0;
}

Rat rat_from_double(double x, long long max_den, double tol) {
    if (!std::isfinite(x)) throw std::invalid_argument("rat_from_double: non-finite input");
    const bool neg = x < 0;
    double v = neg ? -x : x;

    // Continued-fraction convergents p/q of v.
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = v;
    for (int iter = 0; iter < 64; ++iter) {
        const double fl = std::floor(frac);
        if (fl > static_cast<double>(max_den)) break;
        const long long a = static_cast<long long>(fl);
        const long long p2 = a * p1 + p0;
        const long long q2 = a * q1 + q0;
        if (q2 > max_den || q2 < 0 || p2 < 0) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(approx - v) <= tol) {
            return Rat(neg ? -p1 : p1, q1);
        }
        const double rem = frac - fl;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    throw std::invalid_argument("rat_from_double: no rational with denominator <= " +
                                std::to_string(max_den) + " within tolerance of " +
                                std::to_string(x));
}

std::string to_string(const Rat& r) {
    if (r.den == 1) return std::to_string(r.num);
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

}  // namespace stepreg
