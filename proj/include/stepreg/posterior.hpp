#ifndef STEPREG_POSTERIOR_HPP
#define STEPREG_POSTERIOR_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stepreg/model.hpp"
#include "stepreg/partitions.hpp"

namespace stepreg {

enum class PartitionClass { EB, BI };

// Prior: pi_K(k) proportional to exp(-c_k * k * log k) on {1,...,k_max},
// uniform over the admissible partitions given K, standard normal heights.
struct PriorConfig {
    double c_k = 1.0;
    int k_max = 0;  // 0 resolves to 10*n at fit time
    BalanceConstraint bc{};
    PartitionClass partition_class = PartitionClass::EB;
};

PriorConfig resolve_prior(PriorConfig cfg, int n);

// log pi_K(k) with the normalizer summed over {1,...,cfg.k_max}.
double log_prior_k(int k, const PriorConfig& cfg);

// True when the first omitted normalizer term is below 1e-15 * Z.
bool prior_tail_ok(const PriorConfig& cfg);

// Prefix sums over responses; cell statistics for (j0, j1] by differencing.
struct SufficientStats {
    std::vector<double> sum;     // size n+1, sum[0] = 0
    std::vector<double> sum_sq;

    static SufficientStats from(const std::vector<double>& y);
    int n() const { return static_cast<int>(sum.size()) - 1; }
    double cell_sum(int j0, int j1) const { return sum[j1] - sum[j0]; }
    double cell_sum_sq(int j0, int j1) const { return sum_sq[j1] - sum_sq[j0]; }
};

// log of the conjugate cell integral
//   integral prod_{i in cell} phi(y_i - b) * phi(b) db
//     = -(m/2) log(2 pi) - (1/2) log(1+m) - (1/2) (q - s^2 / (1+m))
// for a cell holding m points with sum s and sum of squares q. Unit noise
// variance throughout; callers rescale data when noise_sd != 1.
double log_cell_marginal(double s, double q, int m);

// Sum of cell marginals over the cells of p.
double log_marginal_likelihood(const Dataset& data, const Partition& p);

struct DpEvidence {
    double log_sum = 0.0;  // log sum over admissible K-partitions of exp(marginal)
    bool feasible = false;
};

// Exact sum over all admissible K-partitions via dynamic programming over
// the last split position, O(n^2 K), with per-segment width filtering when
// a balance constraint is given. Infeasible -> log_sum = -inf, flag false.
DpEvidence evidence_dp(const Dataset& data, int K, std::optional<BalanceConstraint> bc);

struct FitDiagnostics {
    std::string engine;
    double accept_birth = 0.0;
    double accept_death = 0.0;
    double accept_relocate = 0.0;
    double ess_k = 0.0;          // iid draw count (exact) or autocorrelation proxy (mcmc)
    bool prior_tail_ok = true;
    std::vector<int> skipped_k;  // K values with no admissible partition
    bool card_exact = true;      // partition counts are exact integers here
    double noise_scale = 1.0;    // responses were divided by this before inference
};

struct PosteriorSummary {
    std::map<int, double> log_evidence_per_k;  // log p(Y | K), partition prior integrated
    std::map<int, double> posterior_k;         // sums to 1
    std::vector<StepFunction> samples;
    std::vector<double> mean_on_grid;
    FitDiagnostics diagnostics;

    int k_mode() const;
};

// Exact posterior over K = 1..k_limit. EB: the single equivalent-block
// partition per K (non-divisors of n are skipped and flagged). BI: DP
// evidence combined with the exact balanced-partition count. Posterior
// draws (partitions via backward sampling, then conjugate heights) are
// generated from the seeded stream.
PosteriorSummary exact_posterior(const Dataset& data, const PriorConfig& cfg, int k_limit,
                                 int n_samples = 500, std::uint64_t seed = 1);

// m independent exact draws from the conditional posterior over
// K-partitions given the data (backward sampling through the DP table).
std::vector<Partition> sample_partition_given_k(const Dataset& data, int K,
                                                std::optional<BalanceConstraint> bc, int m,
                                                Rng& rng);

// Conjugate update: per cell, beta_k ~ Normal(s_k/(1+m_k), 1/(1+m_k)).
StepFunction sample_heights_given_partition(const Dataset& data, const Partition& p, Rng& rng);

// Collapsed Metropolis-Hastings over (K, split set) with heights
// marginalized out: BIRTH / DEATH / RELOCATE moves (0.35/0.35/0.30),
// balance-violating proposals rejected, acceptance ratios carrying the
// prior on K, the uniform-partition (cardinality) term and the proposal
// asymmetry. Balanced-interval class only; the equivalent-block posterior
// is available in closed form through exact_posterior.
PosteriorSummary mcmc_posterior(const Dataset& data, const PriorConfig& cfg, long iters,
                                std::uint64_t seed, int n_samples = 500);

// Fraction of posterior draws at empirical-norm distance >= radius from f0.
double concentration_mass(const PosteriorSummary& summary, const StepFunction& f0,
                          double radius, const Grid& grid);

}  // namespace stepreg

#endif
