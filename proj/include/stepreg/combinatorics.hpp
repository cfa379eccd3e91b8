#ifndef STEPREG_COMBINATORICS_HPP
#define STEPREG_COMBINATORICS_HPP

#include <cstdint>

#include "stepreg/partitions.hpp"
#include "stepreg/rational.hpp"

namespace stepreg {

// Exact probability as a reduced big-integer fraction in [0,1]. `snapped`
// records that the threshold C was not a multiple of 1/n and was replaced
// by the grid value inducing the same event.
struct ExactProbability {
    BigInt num = 0;
    BigInt den = 1;
    bool snapped = false;

    double value() const;
};

ExactProbability make_probability(BigInt num, BigInt den, bool snapped = false);

// C(a, b); 0 outside the usual range (b < 0, b > a, or a < 0).
BigInt binom(const BigInt& a, const BigInt& b);

// Approximate log C(a, b) via log-gamma. Presentation-only fallback for
// very large arguments; everything load-bearing stays exact.
double log_binom(double a, double b);

// Natural log of a positive big integer (double precision).
double log_big(const BigInt& x);

// Probability that all K spacings of a uniform (K-1)-subset of the n-1
// interior grid points are >= C:
//   C(n - K*ceil(nC) + K - 1, K - 1) / C(n-1, K-1).
// Equals 0 as soon as K*C > 1.
ExactProbability prob_min_cell(int n, int K, const Rat& C);

// Probability that all K spacings are <= C. Inclusion-exclusion over which
// cells exceed a = floor(nC) grid units:
//   sum_j (-1)^j C(K, j) C(n - j*a - 1, K - 1) / C(n-1, K-1).
ExactProbability prob_max_cell(int n, int K, const Rat& C);

struct SpacingProbs {
    ExactProbability min_prob;
    ExactProbability max_prob;
};

// Exhaustive-enumeration oracle for the two spacing probabilities. Guarded
// by C(n-1, K-1) <= max_subsets (TooLargeError beyond it).
SpacingProbs brute_force_spacing_probs(int n, int K, const Rat& C,
                                       long long max_subsets = 10000000);

struct CoverEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    long trials = 0;
};

// Monte Carlo probability that K closed arcs of the given length, with left
// endpoints drawn uniformly without replacement from n equidistant points
// on a unit-circumference circle, cover the circle.
CoverEstimate circle_cover_mc(int n, int K, const Rat& arc_length, long trials,
                              std::uint64_t seed);

// Exhaustive coverage probability over all C(n, K) endpoint choices.
ExactProbability circle_cover_exact(int n, int K, const Rat& arc_length,
                                    long long max_subsets = 10000000);

}  // namespace stepreg

#endif
