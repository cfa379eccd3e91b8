#ifndef STEPREG_TESTS_ORACLE_HELPERS_HPP
#define STEPREG_TESTS_ORACLE_HELPERS_HPP

// Independent numerical oracles for the test suites. Nothing here calls the
// library's marginal-likelihood or DP code paths; quadrature and Monte Carlo
// integration use the standard library RNG on purpose.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-13, int depth = 40) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// log of integral over beta of prod_i phi(y_i - beta) * phi(beta), computed
// by bracketing the log-integrand maximum on a scan grid and integrating the
// shifted exponential with adaptive Simpson.
inline double log_cell_marginal_quadrature(const std::vector<double>& y) {
    const double log2pi = std::log(2.0 * M_PI);
    auto log_g = [&](double b) {
        double e = -0.5 * b * b - 0.5 * log2pi;
        for (double v : y) e += -0.5 * (v - b) * (v - b) - 0.5 * log2pi;
        return e;
    };
    double lo = -40.0, hi = 40.0;
    for (double v : y) {
        lo = std::min(lo, v - 40.0);
        hi = std::max(hi, v + 40.0);
    }
    double peak = log_g(lo);
    const int scan = 4000;
    for (int i = 0; i <= scan; ++i)
        peak = std::max(peak, log_g(lo + (hi - lo) * i / scan));
    auto shifted = [&](double b) { return std::exp(log_g(b) - peak); };
    const double integral = adaptive_simpson(shifted, lo, hi, 1e-13, 48);
    return peak + std::log(integral);
}

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

// Monte Carlo estimate of integral over beta in R^K of
// prod_i phi(y_i - beta_{cell(i)}) against the N(0, I_K) prior, i.e. the
// marginal likelihood of a fixed partition. cell_of[i] gives the cell of
// point i. Uses std::mt19937_64, independent of the library RNG.
inline McEstimate mc_marginal_likelihood(const std::vector<double>& y,
                                         const std::vector<int>& cell_of, int n_cells,
                                         long draws, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double log2pi = std::log(2.0 * M_PI);
    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> beta(n_cells);
    for (long t = 0; t < draws; ++t) {
        for (double& b : beta) b = normal(gen);
        double loglik = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double r = y[i] - beta[cell_of[i]];
            loglik += -0.5 * r * r - 0.5 * log2pi;
        }
        const double w = std::exp(loglik);
        sum += w;
        sum_sq += w * w;
    }
    McEstimate est;
    est.mean = sum / draws;
    const double s2 = (sum_sq - draws * est.mean * est.mean) / (draws - 1.0);
    est.std_error = std::sqrt(std::max(0.0, s2) / draws);
    return est;
}

// Pearson chi-square statistic against expected probabilities.
inline double chi_square_stat(const std::vector<long>& observed,
                              const std::vector<double>& expected_p, long total) {
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected_p[i] * total;
        const double d = observed[i] - e;
        stat += d * d / e;
    }
    return stat;
}

// FNV-1a over the bit patterns; used for byte-identity assertions.
inline std::uint64_t hash_doubles(const std::vector<double>& v) {
    std::uint64_t h = 1469598103934665603ULL;
    for (double d : v) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof bits);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace oracle

#endif
