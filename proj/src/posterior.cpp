#include "stepreg/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "stepreg/combinatorics.hpp"
#include "stepreg/errors.hpp"

namespace stepreg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

inline double logaddexp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

}  // namespace

PriorConfig resolve_prior(PriorConfig cfg, int n) {
    if (cfg.k_max <= 0) cfg.k_max = 10 * n;
    if (cfg.c_k <= 0) throw std::invalid_argument("PriorConfig: c_k must be positive");
    return cfg;
}

namespace {
inline double log_prior_term(int k, double c_k) {
    return -c_k * k * std::log(static_cast<double>(k));  // 1*log(1) = 0
}

double prior_normalizer(const PriorConfig& cfg) {
    double z = 0.0;
    for (int j = 1; j <= cfg.k_max; ++j) z += std::exp(log_prior_term(j, cfg.c_k));
    return z;
}
}  // namespace

double log_prior_k(int k, const PriorConfig& cfg) {
    if (cfg.k_max < 1) throw std::invalid_argument("log_prior_k: k_max not resolved");
    if (k < 1 || k > cfg.k_max) throw std::invalid_argument("log_prior_k: k out of range");
    return log_prior_term(k, cfg.c_k) - std::log(prior_normalizer(cfg));
}

bool prior_tail_ok(const PriorConfig& cfg) {
    const double z = prior_normalizer(cfg);
    return std::exp(log_prior_term(cfg.k_max + 1, cfg.c_k)) < 1e-15 * z;
}

SufficientStats SufficientStats::from(const std::vector<double>& y) {
    SufficientStats ss;
    ss.sum.assign(y.size() + 1, 0.0);
    ss.sum_sq.assign(y.size() + 1, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss.sum[i + 1] = ss.sum[i] + y[i];
        ss.sum_sq[i + 1] = ss.sum_sq[i] + y[i] * y[i];
    }
    return ss;
}

double log_cell_marginal(double s, double q, int m) {
    if (m < 1) throw std::invalid_argument("log_cell_marginal: cell must hold >= 1 points");
    return -0.5 * m * kLog2Pi - 0.5 * std::log1p(static_cast<double>(m)) -
           0.5 * (q - s * s / (1.0 + m));
}

namespace {

double partition_marginal(const SufficientStats& ss, const std::vector<int>& splits) {
    double total = 0.0;
    int prev = 0;
    auto add_cell = [&](int j) {
        total += log_cell_marginal(ss.cell_sum(prev, j), ss.cell_sum_sq(prev, j), j - prev);
        prev = j;
    };
    for (int j : splits) add_cell(j);
    add_cell(ss.n());
    return total;
}

}  // namespace

double log_marginal_likelihood(const Dataset& data, const Partition& p) {
    if (p.n != data.grid.n)
        throw std::invalid_argument("log_marginal_likelihood: partition and data disagree on n");
    const SufficientStats ss = SufficientStats::from(data.responses);
    return partition_marginal(ss, p.splits);
}

namespace {

// a[k][i] = log sum over ways to segment the first i points into k cells
// (each cell width inside [lo, hi]) of the product of cell marginals.
struct DpTable {
    int n = 0;
    int K = 0;
    long lo = 1;
    long hi = 0;
    std::vector<std::vector<double>> a;
    bool feasible = false;
    double log_sum() const { return a[K][n]; }
};

DpTable build_dp_table(const SufficientStats& ss, int K,
                       const std::optional<BalanceConstraint>& bc) {
    const int n = ss.n();
    DpTable t;
    t.n = n;
    t.K = K;
    t.hi = n;
    if (bc) {
        const WidthBounds b = balanced_width_bounds(n, K, *bc);
        t.lo = b.lo;
        t.hi = b.hi;
    }
    t.a.assign(K + 1, std::vector<double>(n + 1, kNegInf));
    t.a[0][0] = 0.0;
    if (t.lo > t.hi) return t;
    for (int k = 1; k <= K; ++k) {
        const long imin = static_cast<long>(k) * t.lo;
        const long imax = n - static_cast<long>(K - k) * t.lo;
        for (long i = imin; i <= imax; ++i) {
            double acc = kNegInf;
            const long jmin = std::max<long>((k - 1) * t.lo, i - t.hi);
            const long jmax = i - t.lo;
            for (long j = jmin; j <= jmax; ++j) {
                const double prevv = t.a[k - 1][j];
                if (prevv == kNegInf) continue;
                const double cell = log_cell_marginal(
                    ss.cell_sum(static_cast<int>(j), static_cast<int>(i)),
                    ss.cell_sum_sq(static_cast<int>(j), static_cast<int>(i)),
                    static_cast<int>(i - j));
                acc = logaddexp(acc, prevv + cell);
            }
            t.a[k][static_cast<int>(i)] = acc;
        }
    }
    t.feasible = t.a[K][n] != kNegInf;
    return t;
}

Partition backward_sample(const DpTable& t, const SufficientStats& ss, Rng& rng) {
    std::vector<int> splits;
    int i = t.n;
    for (int k = t.K; k >= 1; --k) {
        const double u = rng.uniform01();
        double acc = 0.0;
        const long jmin = std::max<long>((k - 1) * t.lo, i - t.hi);
        const long jmax = i - t.lo;
        long chosen = -1, last_positive = -1;
        for (long j = jmin; j <= jmax; ++j) {
            const double prevv = t.a[k - 1][j];
            if (prevv == kNegInf) continue;
            const double cell = log_cell_marginal(
                ss.cell_sum(static_cast<int>(j), i), ss.cell_sum_sq(static_cast<int>(j), i),
                static_cast<int>(i - j));
            acc += std::exp(prevv + cell - t.a[k][i]);  // weights normalized by a[k][i]
            last_positive = j;
            if (u <= acc) {
                chosen = j;
                break;
            }
        }
        if (chosen < 0) chosen = last_positive;  // rounding guard
        if (k > 1) splits.push_back(static_cast<int>(chosen));
        i = static_cast<int>(chosen);
    }
    std::sort(splits.begin(), splits.end());
    return Partition{t.n, std::move(splits), PartitionKind::BalancedInterval};
}

}  // namespace

DpEvidence evidence_dp(const Dataset& data, int K, std::optional<BalanceConstraint> bc) {
    const int n = data.grid.n;
    if (K < 1 || K > n) throw std::invalid_argument("evidence_dp: need 1 <= K <= n");
    const SufficientStats ss = SufficientStats::from(data.responses);
    const DpTable t = build_dp_table(ss, K, bc);
    return DpEvidence{t.log_sum(), t.feasible};
}

std::vector<Partition> sample_partition_given_k(const Dataset& data, int K,
                                                std::optional<BalanceConstraint> bc, int m,
                                                Rng& rng) {
    const int n = data.grid.n;
    if (K < 1 || K > n) throw std::invalid_argument("sample_partition_given_k: need 1 <= K <= n");
    const SufficientStats ss = SufficientStats::from(data.responses);
    const DpTable t = build_dp_table(ss, K, bc);
    if (!t.feasible)
        throw NoBalancedPartitionError("sample_partition_given_k: no admissible partition");
    std::vector<Partition> out;
    out.reserve(m);
    for (int i = 0; i < m; ++i) out.push_back(backward_sample(t, ss, rng));
    return out;
}

StepFunction sample_heights_given_partition(const Dataset& data, const Partition& p, Rng& rng) {
    if (p.n != data.grid.n)
        throw std::invalid_argument("sample_heights_given_partition: n mismatch");
    const SufficientStats ss = SufficientStats::from(data.responses);
    std::vector<double> heights;
    heights.reserve(p.cells());
    int prev = 0;
    auto sample_cell = [&](int j) {
        const int m = j - prev;
        const double mean = ss.cell_sum(prev, j) / (1.0 + m);
        const double sd = std::sqrt(1.0 / (1.0 + m));
        heights.push_back(mean + sd * rng.normal());
        prev = j;
    };
    for (int j : p.splits) sample_cell(j);
    sample_cell(p.n);
    return StepFunction::on_grid(p.n, p.splits, std::move(heights));
}

int PosteriorSummary::k_mode() const {
    int best_k = 0;
    double best_p = -1.0;
    for (const auto& [k, p] : posterior_k)
        if (p > best_p) {
            best_p = p;
            best_k = k;
        }
    return best_k;
}

namespace {

struct WorkingData {
    Dataset data;        // responses divided by noise_sd when != 1
    double scale = 1.0;  // multiply heights back by this
};

WorkingData standardize(const Dataset& data) {
    WorkingData w{data, 1.0};
    if (data.noise_sd > 0.0 && data.noise_sd != 1.0) {
        w.scale = data.noise_sd;
        for (double& y : w.data.responses) y /= w.scale;
    }
    return w;
}

// Per-cell posterior means s/(1+m) tabulated on the grid.
void accumulate_cell_means(const SufficientStats& ss, const std::vector<int>& splits,
                           double weight, std::vector<double>& acc) {
    int prev = 0;
    auto cell = [&](int j) {
        const double mean = ss.cell_sum(prev, j) / (1.0 + (j - prev));
        for (int i = prev; i < j; ++i) acc[i] += weight * mean;
        prev = j;
    };
    for (int j : splits) cell(j);
    cell(ss.n());
}

std::map<int, double> normalize_log_weights(const std::map<int, double>& logw) {
    double m = kNegInf;
    for (const auto& [k, v] : logw) m = std::max(m, v);
    double z = 0.0;
    for (const auto& [k, v] : logw) z += std::exp(v - m);
    std::map<int, double> out;
    for (const auto& [k, v] : logw) out[k] = std::exp(v - m) / z;
    return out;
}

int draw_from_pmf(const std::map<int, double>& pmf, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    int last = 0;
    for (const auto& [k, p] : pmf) {
        acc += p;
        last = k;
        if (u <= acc) return k;
    }
    return last;
}

}  // namespace

PosteriorSummary exact_posterior(const Dataset& data, const PriorConfig& cfg0, int k_limit,
                                 int n_samples, std::uint64_t seed) {
    const int n = data.grid.n;
    if (k_limit < 1 || k_limit > n)
        throw std::invalid_argument("exact_posterior: need 1 <= k_limit <= n");
    if (n_samples < 0) throw std::invalid_argument("exact_posterior: n_samples must be >= 0");
    const PriorConfig cfg = resolve_prior(cfg0, n);
    const int kmax = std::min(k_limit, cfg.k_max);

    const WorkingData w = standardize(data);
    const SufficientStats ss = SufficientStats::from(w.data.responses);

    PosteriorSummary out;
    out.diagnostics.engine = "exact";
    out.diagnostics.prior_tail_ok = prior_tail_ok(cfg);
    out.diagnostics.noise_scale = w.scale;

    std::map<int, DpTable> tables;  // BI only
    std::map<int, double> log_post;
    for (int K = 1; K <= kmax; ++K) {
        if (cfg.partition_class == PartitionClass::EB) {
            if (n % K != 0) {
                out.diagnostics.skipped_k.push_back(K);
                continue;
            }
            const int c = n / K;
            double ml = 0.0;
            for (int k = 0; k < K; ++k)
                ml += log_cell_marginal(ss.cell_sum(k * c, (k + 1) * c),
                                        ss.cell_sum_sq(k * c, (k + 1) * c), c);
            out.log_evidence_per_k[K] = ml;
        } else {
            const BigInt card = count_balanced(n, K, cfg.bc);
            if (card == 0) {
                out.diagnostics.skipped_k.push_back(K);
                continue;
            }
            DpTable t = build_dp_table(ss, K, cfg.bc);
            if (!t.feasible) {
                out.diagnostics.skipped_k.push_back(K);
                continue;
            }
            out.log_evidence_per_k[K] = t.log_sum() - log_big(card);
            tables.emplace(K, std::move(t));
        }
        log_post[K] = log_prior_k(K, cfg) + out.log_evidence_per_k[K];
    }
    if (log_post.empty())
        throw NoModelError("exact_posterior: every K in 1.." + std::to_string(kmax) +
                           " was skipped");
    out.posterior_k = normalize_log_weights(log_post);

    // Posterior draws and the (Rao-Blackwellized) posterior mean.
    Rng rng(seed);
    out.mean_on_grid.assign(n, 0.0);
    if (cfg.partition_class == PartitionClass::EB) {
        // Partition given K is deterministic: the mean is exact.
        for (const auto& [K, p] : out.posterior_k)
            accumulate_cell_means(ss, equivalent_blocks(n, K).splits, p, out.mean_on_grid);
    }
    std::vector<double> bi_mean(n, 0.0);
    out.samples.reserve(n_samples);
    for (int s = 0; s < n_samples; ++s) {
        const int K = draw_from_pmf(out.posterior_k, rng);
        Partition p = (cfg.partition_class == PartitionClass::EB)
                          ? equivalent_blocks(n, K)
                          : backward_sample(tables.at(K), ss, rng);
        if (cfg.partition_class == PartitionClass::BI)
            accumulate_cell_means(ss, p.splits, 1.0 / n_samples, bi_mean);
        StepFunction f = sample_heights_given_partition(w.data, p, rng);
        if (w.scale != 1.0) {
            std::vector<double> hs = f.heights();
            for (double& h : hs) h *= w.scale;
            f = StepFunction(f.breakpoints(), std::move(hs));
        }
        out.samples.push_back(std::move(f));
    }
    if (cfg.partition_class == PartitionClass::BI && n_samples > 0)
        out.mean_on_grid = std::move(bi_mean);
    for (double& v : out.mean_on_grid) v *= w.scale;
    out.diagnostics.ess_k = n_samples;
    return out;
}

PosteriorSummary mcmc_posterior(const Dataset& data, const PriorConfig& cfg0, long iters,
                                std::uint64_t seed, int n_samples) {
    const int n = data.grid.n;
    if (iters < 1) throw std::invalid_argument("mcmc_posterior: iters must be >= 1");
    if (cfg0.partition_class == PartitionClass::EB)
        throw std::invalid_argument(
            "mcmc_posterior: split-set moves require the balanced-interval class; "
            "use exact_posterior for equivalent blocks");
    const PriorConfig cfg = resolve_prior(cfg0, n);
    const int kmax = std::min(n, cfg.k_max);

    const WorkingData w = standardize(data);
    const SufficientStats ss = SufficientStats::from(w.data.responses);

    // Precomputed pieces of the target density.
    std::vector<double> lp(kmax + 2, kNegInf);
    for (int k = 1; k <= kmax; ++k) lp[k] = log_prior_k(k, cfg);
    std::vector<double> log_card(kmax + 2, 2.0);  // sentinel: not computed
    auto card_of = [&](int K) {
        if (log_card[K] > 1.0) log_card[K] = log_big(count_balanced(n, K, cfg.bc));
        return log_card[K];
    };
    auto widths_ok = [&](const std::vector<int>& splits) {
        const int K = static_cast<int>(splits.size()) + 1;
        const WidthBounds b = balanced_width_bounds(n, K, cfg.bc);
        int prev = 0;
        for (int j : splits) {
            if (j - prev < b.lo || j - prev > b.hi) return false;
            prev = j;
        }
        return n - prev >= b.lo && n - prev <= b.hi;
    };

    std::vector<int> splits;  // current state, K = splits.size() + 1
    double ml = partition_marginal(ss, splits);

    Rng rng(seed);
    const long burn = iters / 5;
    const long kept_span = iters - burn;
    const int keep = std::min<long>(n_samples, kept_span);

    long prop[3] = {0, 0, 0}, acc[3] = {0, 0, 0};
    std::vector<int> k_trace;
    k_trace.reserve(kept_span);
    std::map<int, long> k_counts;
    std::vector<double> rb_mean(n, 0.0);
    PosteriorSummary out;
    out.diagnostics.engine = "mcmc";
    out.diagnostics.prior_tail_ok = prior_tail_ok(cfg);
    out.diagnostics.noise_scale = w.scale;
    long retained = 0;

    // r-th element (0-based) of {1,...,n-1} minus the current splits.
    auto unused_index = [&](long r) {
        std::size_t si = 0;
        for (int v = 1; v <= n - 1; ++v) {
            if (si < splits.size() && splits[si] == v) {
                ++si;
                continue;
            }
            if (r == 0) return v;
            --r;
        }
        return n - 1;
    };

    for (long it = 0; it < iters; ++it) {
        const int K = static_cast<int>(splits.size()) + 1;
        const double mu = rng.uniform01();
        const int move = mu < 0.35 ? 0 : (mu < 0.70 ? 1 : 2);
        ++prop[move];

        if (move == 0 && K < kmax) {  // BIRTH
            const int u = unused_index(static_cast<long>(rng.below(n - K)));
            std::vector<int> next = splits;
            next.insert(std::upper_bound(next.begin(), next.end(), u), u);
            if (widths_ok(next)) {
                const double ml_next = partition_marginal(ss, next);
                const double log_alpha = lp[K + 1] - lp[K] + card_of(K) - card_of(K + 1) +
                                         ml_next - ml +
                                         std::log(static_cast<double>(n - K) / K);
                if (std::log(1.0 - rng.uniform01()) < log_alpha) {
                    splits = std::move(next);
                    ml = ml_next;
                    ++acc[0];
                }
            }
        } else if (move == 1 && K > 1) {  // DEATH
            const std::size_t idx = rng.below(splits.size());
            std::vector<int> next = splits;
            next.erase(next.begin() + idx);
            if (widths_ok(next)) {
                const double ml_next = partition_marginal(ss, next);
                const double log_alpha = lp[K - 1] - lp[K] + card_of(K) - card_of(K - 1) +
                                         ml_next - ml +
                                         std::log(static_cast<double>(K - 1) / (n - K + 1));
                if (std::log(1.0 - rng.uniform01()) < log_alpha) {
                    splits = std::move(next);
                    ml = ml_next;
                    ++acc[1];
                }
            }
        } else if (move == 2 && K > 1 && K < n) {  // RELOCATE (symmetric)
            const std::size_t idx = rng.below(splits.size());
            const int t = unused_index(static_cast<long>(rng.below(n - K)));
            std::vector<int> next = splits;
            next.erase(next.begin() + idx);
            next.insert(std::upper_bound(next.begin(), next.end(), t), t);
            if (widths_ok(next)) {
                const double ml_next = partition_marginal(ss, next);
                if (std::log(1.0 - rng.uniform01()) < ml_next - ml) {
                    splits = std::move(next);
                    ml = ml_next;
                    ++acc[2];
                }
            }
        }
        // moves impossible in the current state count as rejected proposals

        if (it >= burn) {
            const int cur_k = static_cast<int>(splits.size()) + 1;
            k_trace.push_back(cur_k);
            ++k_counts[cur_k];
            if (keep > 0 &&
                (it - burn + 1) * static_cast<long long>(keep) > retained * static_cast<long long>(kept_span)) {
                Partition p{n, splits, PartitionKind::BalancedInterval};
                accumulate_cell_means(ss, p.splits, 1.0, rb_mean);
                StepFunction f = sample_heights_given_partition(w.data, p, rng);
                if (w.scale != 1.0) {
                    std::vector<double> hs = f.heights();
                    for (double& h : hs) h *= w.scale;
                    f = StepFunction(f.breakpoints(), std::move(hs));
                }
                out.samples.push_back(std::move(f));
                ++retained;
            }
        }
    }

    for (const auto& [k, c] : k_counts)
        out.posterior_k[k] = static_cast<double>(c) / static_cast<double>(kept_span);
    out.mean_on_grid.assign(n, 0.0);
    if (retained > 0)
        for (int i = 0; i < n; ++i) out.mean_on_grid[i] = rb_mean[i] * w.scale / retained;

    out.diagnostics.accept_birth = prop[0] ? static_cast<double>(acc[0]) / prop[0] : 0.0;
    out.diagnostics.accept_death = prop[1] ? static_cast<double>(acc[1]) / prop[1] : 0.0;
    out.diagnostics.accept_relocate = prop[2] ? static_cast<double>(acc[2]) / prop[2] : 0.0;

    // Lag-1 autocorrelation proxy for the effective sample size of K.
    if (k_trace.size() > 2) {
        double mean = 0.0;
        for (int k : k_trace) mean += k;
        mean /= k_trace.size();
        double var = 0.0, cov = 0.0;
        for (std::size_t i = 0; i < k_trace.size(); ++i) {
            var += (k_trace[i] - mean) * (k_trace[i] - mean);
            if (i + 1 < k_trace.size()) cov += (k_trace[i] - mean) * (k_trace[i + 1] - mean);
        }
        const double rho = var > 0 ? cov / var : 0.0;
        out.diagnostics.ess_k =
            var > 0 ? k_trace.size() * std::max(1e-3, 1.0 - rho) / (1.0 + rho)
                    : static_cast<double>(k_trace.size());
    } else {
        out.diagnostics.ess_k = static_cast<double>(k_trace.size());
    }
    return out;
}

double concentration_mass(const PosteriorSummary& summary, const StepFunction& f0,
                          double radius, const Grid& grid) {
    if (summary.samples.empty())
        throw std::invalid_argument("concentration_mass: summary holds no posterior samples");
    const std::vector<double> f0x = f0.values_on_grid(grid);
    long outside = 0;
    for (const StepFunction& f : summary.samples)
        if (empirical_norm(f.values_on_grid(grid), f0x) >= radius) ++outside;
    return static_cast<double>(outside) / static_cast<double>(summary.samples.size());
}

}  // namespace stepreg
