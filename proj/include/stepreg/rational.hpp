#ifndef STEPREG_RATIONAL_HPP
#define STEPREG_RATIONAL_HPP

#include <cstdint>
#include <string>

namespace stepreg {

// Exact rational with 64-bit terms. Breakpoints, grid points and balance
// thresholds are compared through this type so that cell-boundary decisions
// never depend on floating-point rounding. Always stored reduced, den > 0.
struct Rat {
    long long num = 0;
    long long den = 1;

    Rat() = default;
    Rat(long long n, long long d);  // normalizes; throws on d == 0

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }
};

// Sign of a - b, computed exactly via 128-bit cross multiplication.
int cmp(const Rat& a, const Rat& b);

// Sign of (p1/q1) - (p2/q2) without constructing Rats. q1, q2 > 0.
int cmp_frac(long long p1, long long q1, long long p2, long long q2);

inline bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
inline bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
inline bool operator<(const Rat& a, const Rat& b) { return cmp(a, b) < 0; }
inline bool operator<=(const Rat& a, const Rat& b) { return cmp(a, b) <= 0; }
inline bool operator>(const Rat& a, const Rat& b) { return cmp(a, b) > 0; }
inline bool operator>=(const Rat& a, const Rat& b) { return cmp(a, b) >= 0; }

Rat operator+(const Rat& a, const Rat& b);
Rat operator-(const Rat& a, const Rat& b);
Rat operator*(const Rat& a, const Rat& b);

// True iff x * k is an integer.
bool is_integer_multiple(const Rat& x, long long k);

// Best rational with den <= max_den within tol of x (continued fractions).
// Recovers p/q exactly from a double that was produced by rounding p/q.
// Throws std::invalid_argument when no such rational exists; values typed
// as short decimals (0.1, 0.125, ...) always succeed.
Rat rat_from_double(double x, long long max_den = (1LL << 31), double tol = 1e-9);

std::string to_string(const Rat& r);

}  // namespace stepreg

#endif
