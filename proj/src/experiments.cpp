#include "stepreg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "stepreg/complexity.hpp"
#include "stepreg/errors.hpp"

namespace stepreg {

double default_radius_multiplier(int n) {
    return std::max(1.0, std::log(std::log(static_cast<double>(n))));
}

double epsilon_schedule(int n, int k_f0) {
    const double r = std::log(static_cast<double>(n) / k_f0);
    return std::sqrt(k_f0 * r / n);
}

double epsilon_schedule_bi(int n, int k_f0, double beta) {
    const double r = std::log(static_cast<double>(n) / k_f0);
    return std::sqrt(k_f0 * std::pow(r, 2.0 * beta) / n);
}

namespace {

// Runs fn(0..count-1) across hardware threads; each item writes its own
// slot, so the reduction order never depends on scheduling. The first
// worker exception is rethrown on the calling thread.
void parallel_for(int count, const std::function<void(int)>& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(count));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct RepResult {
    double error = 0.0;
    double mass_outside = 0.0;
    bool mode_hit = false;
    int k_mode = 0;
};

int resolve_k_limit(const ExperimentConfig& cfg, int n, int k_f0) {
    if (cfg.k_limit > 0) return std::min(cfg.k_limit, n);
    return std::min(n, std::max(8, 4 * k_f0 + 8));
}

int complexity_for_class(const ExperimentConfig& cfg, int n) {
    const ComplexityResult r =
        (cfg.prior.partition_class == PartitionClass::EB)
            ? complexity_eb(cfg.f0, n, n)
            : complexity_bi(cfg.f0, n, cfg.prior.bc, n);
    if (!r.k)
        throw std::invalid_argument(
            "run_concentration: f0 has no finite complexity w.r.t. the chosen class at n=" +
            std::to_string(n));
    return *r.k;
}

RepResult run_rep(const ExperimentConfig& cfg, int n, int rep, int k_f0) {
    const std::uint64_t sim_seed = derive_seed(cfg.seed_base, static_cast<std::uint64_t>(n),
                                               2 * static_cast<std::uint64_t>(rep));
    const std::uint64_t fit_seed = derive_seed(cfg.seed_base, static_cast<std::uint64_t>(n),
                                               2 * static_cast<std::uint64_t>(rep) + 1);
    const Dataset data = simulate(cfg.f0, n, cfg.noise_sd, sim_seed);
    const int k_limit = resolve_k_limit(cfg, n, k_f0);

    PosteriorSummary summary =
        (cfg.engine == ExperimentConfig::Engine::Exact)
            ? exact_posterior(data, cfg.prior, k_limit, cfg.n_samples, fit_seed)
            : mcmc_posterior(data, cfg.prior, cfg.mcmc_iters, fit_seed, cfg.n_samples);

    const double eps = (cfg.prior.partition_class == PartitionClass::EB)
                           ? epsilon_schedule(n, k_f0)
                           : epsilon_schedule_bi(n, k_f0, cfg.rate_exponent_beta);
    const double radius = cfg.radius_multiplier(n) * eps;

    RepResult r;
    r.error = empirical_norm(summary.mean_on_grid, cfg.f0.values_on_grid(data.grid));
    r.mass_outside = concentration_mass(summary, cfg.f0, radius, data.grid);
    r.k_mode = summary.k_mode();
    r.mode_hit = (r.k_mode == k_f0);
    return r;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return (v.size() % 2 == 1) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<ConcentrationRow> run_concentration(const ExperimentConfig& cfg) {
    if (cfg.reps < 1) throw std::invalid_argument("run_concentration: reps must be >= 1");
    if (cfg.n_list.empty() ||
        !std::is_sorted(cfg.n_list.begin(), cfg.n_list.end(), std::less_equal<>()))
        throw std::invalid_argument("run_concentration: n_list must be strictly increasing");

    std::vector<ConcentrationRow> rows;
    rows.reserve(cfg.n_list.size());
    for (int n : cfg.n_list) {
        const int k_f0 = complexity_for_class(cfg, n);
        std::vector<RepResult> results(cfg.reps);
        parallel_for(cfg.reps, [&](int rep) { results[rep] = run_rep(cfg, n, rep, k_f0); });

        ConcentrationRow row;
        row.n = n;
        row.k_f0 = k_f0;
        row.epsilon_n = epsilon_schedule(n, k_f0);
        row.epsilon_n_bi = epsilon_schedule_bi(n, k_f0, cfg.rate_exponent_beta);
        std::vector<double> errs;
        errs.reserve(cfg.reps);
        double mass = 0.0;
        int hits = 0;
        for (const RepResult& r : results) {
            errs.push_back(r.error);
            mass += r.mass_outside;
            hits += r.mode_hit ? 1 : 0;
        }
        row.median_error = median(std::move(errs));
        row.mass_outside = mass / cfg.reps;
        row.k_mode_hit_rate = static_cast<double>(hits) / cfg.reps;
        rows.push_back(row);
    }
    return rows;
}

double rate_slope(const std::vector<ConcentrationRow>& rows) {
    std::vector<double> lx, ly;
    for (const ConcentrationRow& r : rows)
        if (r.median_error > 0.0) {
            lx.push_back(std::log(static_cast<double>(r.n)));
            ly.push_back(std::log(r.median_error));
        }
    if (lx.size() < 3)
        throw std::invalid_argument("rate_slope: need at least 3 rows with positive errors");
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    return sxy / sxx;
}

std::vector<CkRow> ck_sensitivity(const ExperimentConfig& cfg,
                                  const std::vector<double>& ck_list) {
    if (ck_list.empty()) throw std::invalid_argument("ck_sensitivity: empty c_K list");
    const int n = cfg.n_list.back();
    const int k_f0 = complexity_for_class(cfg, n);

    std::vector<CkRow> rows;
    rows.reserve(ck_list.size());
    for (double ck : ck_list) {
        ExperimentConfig local = cfg;
        local.prior.c_k = ck;
        std::vector<RepResult> results(cfg.reps);
        parallel_for(cfg.reps, [&](int rep) { results[rep] = run_rep(local, n, rep, k_f0); });
        std::map<int, int> mode_votes;
        std::vector<double> errs;
        errs.reserve(cfg.reps);
        for (const RepResult& r : results) {
            ++mode_votes[r.k_mode];
            errs.push_back(r.error);
        }
        CkRow row;
        row.c_k = ck;
        int best = -1;
        for (const auto& [k, votes] : mode_votes)
            if (votes > best) {
                best = votes;
                row.k_mode = k;
            }
        row.median_error = median(std::move(errs));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace stepreg
