#ifndef STEPREG_EXPERIMENTS_HPP
#define STEPREG_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "stepreg/model.hpp"
#include "stepreg/posterior.hpp"

namespace stepreg {

// Slowest natural radius multiplier that still grows: max(1, log log n).
double default_radius_multiplier(int n);

struct ExperimentConfig {
    StepFunction f0 = StepFunction::constant(0.0);
    std::vector<int> n_list{128, 256, 512, 1024};
    int reps = 50;
    double noise_sd = 1.0;
    // Radius multiplier schedule M_n for the concentration ball.
    std::function<double(int)> radius_multiplier = default_radius_multiplier;
    double rate_exponent_beta = 0.75;  // exponent in the balanced-interval radius schedule
    PriorConfig prior{};
    enum class Engine { Exact, Mcmc } engine = Engine::Exact;
    std::uint64_t seed_base = 0;
    long mcmc_iters = 200000;
    int n_samples = 500;
    int k_limit = 0;  // 0: min(n, 4 * k_f0 + 8), clamped to [8, n]
};

struct ConcentrationRow {
    int n = 0;
    int k_f0 = 0;
    double epsilon_n = 0.0;       // sqrt(k log(n/k) / n)
    double epsilon_n_bi = 0.0;    // sqrt(k log^{2 beta}(n/k) / n)
    double median_error = 0.0;    // median over reps of |posterior mean - f0|_n
    double mass_outside = 0.0;    // mean posterior mass outside the M_n * eps ball
    double k_mode_hit_rate = 0.0; // fraction of reps whose posterior K-mode equals k_f0
};

double epsilon_schedule(int n, int k_f0);
double epsilon_schedule_bi(int n, int k_f0, double beta);

// One row per n: simulate, fit, and aggregate over replications. Work items
// run in parallel with seeds derived from (seed_base, n, rep); results are
// reduced in a fixed order so reruns are bit-identical.
std::vector<ConcentrationRow> run_concentration(const ExperimentConfig& cfg);

// Ordinary least-squares slope of log(median_error) against log(n).
double rate_slope(const std::vector<ConcentrationRow>& rows);

struct CkRow {
    double c_k = 0.0;
    int k_mode = 0;           // most frequent posterior K-mode across reps
    double median_error = 0.0;
};

// Sensitivity of the fit to the prior decay c_K at the largest n in cfg.
std::vector<CkRow> ck_sensitivity(const ExperimentConfig& cfg,
                                  const std::vector<double>& ck_list);

}  // namespace stepreg

#endif
