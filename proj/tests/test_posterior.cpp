#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "oracle_helpers.hpp"
#include "stepreg/errors.hpp"
#include "stepreg/posterior.hpp"

using namespace stepreg;

namespace {

Dataset dataset_from(std::vector<double> y) {
    Dataset d;
    d.grid = make_grid(static_cast<int>(y.size()));
    d.responses = std::move(y);
    return d;
}

double logsumexp_all(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    double z = 0.0;
    for (double x : v) z += std::exp(x - m);
    return m + std::log(z);
}

}  // namespace

TEST_CASE("log_prior_k: ratios, normalization, tail flag") {
    PriorConfig cfg = resolve_prior(PriorConfig{}, 10);  // k_max = 100
    CHECK(cfg.k_max == 100);

    CHECK(log_prior_k(2, cfg) - log_prior_k(1, cfg) ==
          doctest::Approx(-cfg.c_k * 2.0 * std::log(2.0)).epsilon(1e-14));

    // pi(1)/pi(3) = exp(3 log 3) = 27 at c_k = 1
    CHECK(std::exp(log_prior_k(1, cfg) - log_prior_k(3, cfg)) ==
          doctest::Approx(27.0).epsilon(1e-12));

    double total = 0.0;
    for (int k = 1; k <= cfg.k_max; ++k) total += std::exp(log_prior_k(k, cfg));
    CHECK(std::fabs(total - 1.0) <= 1e-12);
    CHECK(prior_tail_ok(cfg));

    // c_k -> 0 flattens the prior toward uniform on {1..k_max}; at c_k the
    // pointwise gap from 1/k_max is bounded by c_k * log(k_max)
    PriorConfig flat = cfg;
    flat.c_k = 1e-6;
    for (int k : {1, 7, 50, 100})
        CHECK(std::fabs(std::exp(log_prior_k(k, flat)) - 1.0 / flat.k_max) <=
              flat.c_k * std::log(static_cast<double>(flat.k_max)));
    PriorConfig flatter = cfg;
    flatter.c_k = 1e-9;
    for (int k : {1, 7, 50, 100})
        CHECK(std::fabs(std::exp(log_prior_k(k, flatter)) - 1.0 / flatter.k_max) <= 1e-6);
    CHECK_FALSE(prior_tail_ok(flat));  // truncation is doing real work here

    CHECK_THROWS_AS(log_prior_k(0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(log_prior_k(101, cfg), std::invalid_argument);
}

TEST_CASE("log_cell_marginal: closed form vs quadrature") {
    // m=1, y=0: convolution of two standard normals at zero
    CHECK(log_cell_marginal(0.0, 0.0, 1) ==
          doctest::Approx(-0.5 * std::log(2.0 * M_PI) - 0.5 * std::log(2.0)).epsilon(1e-15));

    CHECK(log_cell_marginal(0.0, 2.0, 2) ==
          doctest::Approx(oracle::log_cell_marginal_quadrature({1.0, -1.0})).epsilon(1e-10));

    std::mt19937_64 gen(12345);
    std::normal_distribution<double> normal(0.0, 1.5);
    for (int t = 0; t < 100; ++t) {
        const int m = 1 + static_cast<int>(gen() % 8);
        std::vector<double> y(m);
        double s = 0.0, q = 0.0;
        for (double& v : y) {
            v = normal(gen);
            s += v;
            q += v * v;
        }
        const double mine = log_cell_marginal(s, q, m);
        const double quad = oracle::log_cell_marginal_quadrature(y);
        CHECK(std::fabs(mine - quad) <= 1e-8);
    }

    CHECK_THROWS_AS(log_cell_marginal(0.0, 0.0, 0), std::invalid_argument);
}

TEST_CASE("log_marginal_likelihood: single cell, additivity, symmetry") {
    const Dataset d = dataset_from({0.3, -1.2, 0.7, 2.0, -0.4, 1.1, 0.0, -2.2, 0.9, 0.5});
    const SufficientStats ss = SufficientStats::from(d.responses);

    // K = 1 is the whole-sample cell marginal
    CHECK(log_marginal_likelihood(d, make_partition(10, {})) ==
          doctest::Approx(log_cell_marginal(ss.cell_sum(0, 10), ss.cell_sum_sq(0, 10), 10))
              .epsilon(1e-15));

    // splitting at 5 adds the two cell marginals
    const double left = log_cell_marginal(ss.cell_sum(0, 5), ss.cell_sum_sq(0, 5), 5);
    const double right = log_cell_marginal(ss.cell_sum(5, 10), ss.cell_sum_sq(5, 10), 5);
    CHECK(log_marginal_likelihood(d, make_partition(10, {5})) ==
          doctest::Approx(left + right).epsilon(1e-15));

    // flipping the sign of every response leaves every cell marginal alone
    Dataset neg = d;
    for (double& y : neg.responses) y = -y;
    for (const auto& splits : std::vector<std::vector<int>>{{}, {3}, {2, 7}, {1, 4, 8}})
        CHECK(log_marginal_likelihood(d, make_partition(10, splits)) ==
              log_marginal_likelihood(neg, make_partition(10, splits)));

    // mirroring the data and the partition also leaves it alone
    Dataset rev = d;
    std::reverse(rev.responses.begin(), rev.responses.end());
    CHECK(log_marginal_likelihood(d, make_partition(10, {3})) ==
          doctest::Approx(log_marginal_likelihood(rev, make_partition(10, {7}))).epsilon(1e-13));

    CHECK_THROWS_AS(log_marginal_likelihood(d, make_partition(9, {3})), std::invalid_argument);
}

TEST_CASE("log_marginal_likelihood vs Monte Carlo integration at n=6") {
    const Dataset d = dataset_from({1.4, 0.8, -0.6, -1.1, 0.2, 0.9});
    const Partition p = make_partition(6, {2, 4});
    std::vector<int> cell_of{0, 0, 1, 1, 2, 2};
    const auto mc = oracle::mc_marginal_likelihood(d.responses, cell_of, 3, 1000000, 777);
    const double mine = std::exp(log_marginal_likelihood(d, p));
    CHECK(std::fabs(mine - mc.mean) <= 3.0 * mc.std_error);
}

TEST_CASE("evidence_dp equals log-sum-exp over enumerated partitions") {
    Rng rng(5150);
    for (int n : {6, 10, 12}) {
        std::vector<double> y(n);
        for (double& v : y) v = rng.normal() + (rng.uniform01() < 0.5 ? 0.0 : 1.5);
        const Dataset d = dataset_from(y);

        for (int K = 1; K <= 4; ++K) {
            // without a balance constraint
            std::vector<double> terms;
            for (const Partition& p : enumerate_partitions(n, K))
                terms.push_back(log_marginal_likelihood(d, p));
            const DpEvidence dp = evidence_dp(d, K, std::nullopt);
            REQUIRE(dp.feasible);
            CHECK(std::fabs(dp.log_sum - logsumexp_all(terms)) <= 1e-9);

            // with the default balance constraint
            const BalanceConstraint bc(0.5, 2.0);
            std::vector<double> bterms;
            for (const Partition& p : enumerate_partitions(n, K, bc))
                bterms.push_back(log_marginal_likelihood(d, p));
            const DpEvidence bdp = evidence_dp(d, K, bc);
            if (bterms.empty()) {
                CHECK_FALSE(bdp.feasible);
            } else {
                REQUIRE(bdp.feasible);
                CHECK(std::fabs(bdp.log_sum - logsumexp_all(bterms)) <= 1e-9);
            }
        }
    }

    // K = 1 reduces to the single-cell marginal
    const Dataset d = dataset_from({0.1, 0.4, -0.2, 0.8});
    CHECK(evidence_dp(d, 1, std::nullopt).log_sum ==
          doctest::Approx(log_marginal_likelihood(d, make_partition(4, {}))).epsilon(1e-15));

    // infeasible balance constraints carry an explicit flag
    const DpEvidence bad = evidence_dp(d, 4, BalanceConstraint(1.0, 1.0));
    CHECK(bad.feasible);  // 4 cells of width 1 on n=4 is exactly balanced
    const DpEvidence bad3 = evidence_dp(d, 3, BalanceConstraint(1.0, 1.0));
    CHECK_FALSE(bad3.feasible);
    CHECK(bad3.log_sum == -std::numeric_limits<double>::infinity());
}

TEST_CASE("exact_posterior: mode at K=1 for constant data") {
    const int n = 32;
    std::vector<double> y(n, 0.8);
    PriorConfig cfg;
    cfg.partition_class = PartitionClass::EB;
    const PosteriorSummary s = exact_posterior(dataset_from(y), cfg, n, 50, 9);
    CHECK(s.k_mode() == 1);

    double total = 0.0;
    for (const auto& [k, p] : s.posterior_k) total += p;
    CHECK(std::fabs(total - 1.0) <= 1e-12);

    PriorConfig bi = cfg;
    bi.partition_class = PartitionClass::BI;
    const PosteriorSummary sbi = exact_posterior(dataset_from(y), bi, 8, 50, 9);
    CHECK(sbi.k_mode() == 1);
}

TEST_CASE("exact_posterior: representable jump pulls mass onto even K (EB)") {
    const StepFunction f0 = StepFunction::from_reals({0.5}, {0.0, 4.0});
    const Dataset d = simulate(f0, 64, 1.0, 20240604);
    PriorConfig cfg;
    cfg.partition_class = PartitionClass::EB;
    const PosteriorSummary s = exact_posterior(d, cfg, 64, 100, 11);
    double even_mass = 0.0;
    for (const auto& [k, p] : s.posterior_k)
        if (k % 2 == 0) even_mass += p;
    CHECK(even_mass > 0.95);
    // non-divisors of 64 are skipped and flagged
    CHECK(!s.diagnostics.skipped_k.empty());
    CHECK(std::count(s.diagnostics.skipped_k.begin(), s.diagnostics.skipped_k.end(), 3) == 1);
}

TEST_CASE("sample_partition_given_k: frequencies match enumerated conditionals") {
    // K = 1: only the trivial partition
    Rng rng(31337);
    const Dataset tiny = dataset_from({0.5, -0.5, 0.25});
    const auto trivial = sample_partition_given_k(tiny, 1, std::nullopt, 5, rng);
    for (const Partition& p : trivial) CHECK(p.splits.empty());

    const StepFunction f0 = StepFunction::from_reals({0.5}, {0.0, 1.0});
    const Dataset d = simulate(f0, 8, 1.0, 71);

    for (int K : {2, 3}) {
        const auto parts = enumerate_partitions(8, K);
        std::vector<double> logw;
        for (const Partition& p : parts) logw.push_back(log_marginal_likelihood(d, p));
        const double lse = logsumexp_all(logw);
        std::vector<double> probs;
        for (double lw : logw) probs.push_back(std::exp(lw - lse));

        std::map<std::vector<int>, long> counts;
        const long draws = 100000;
        const auto sampled = sample_partition_given_k(d, K, std::nullopt, draws, rng);
        for (const Partition& p : sampled) ++counts[p.splits];

        for (std::size_t i = 0; i < parts.size(); ++i) {
            const double p = probs[i];
            const double have = static_cast<double>(counts[parts[i].splits]) / draws;
            const double sigma = std::sqrt(p * (1 - p) / draws);
            CHECK(std::fabs(have - p) <= std::max(3 * sigma, 1e-4));
        }
    }

    // balanced draws respect the constraint
    const BalanceConstraint bc(0.5, 2.0);
    const auto balanced = sample_partition_given_k(d, 3, bc, 500, rng);
    for (const Partition& p : balanced) CHECK(is_balanced(p, bc, d.grid));
}

TEST_CASE("sample_heights_given_partition: conjugate moments") {
    Rng rng(8899);

    // one point y=0: posterior N(0, 1/2)
    const Dataset single = dataset_from({0.0});
    double s1 = 0.0, s2 = 0.0;
    const long draws = 100000;
    for (long t = 0; t < draws; ++t) {
        const double b = sample_heights_given_partition(single, make_partition(1, {}), rng)
                             .heights()[0];
        s1 += b;
        s2 += b * b;
    }
    const double mean1 = s1 / draws, var1 = s2 / draws - mean1 * mean1;
    CHECK(std::fabs(mean1) <= 3.0 * std::sqrt(0.5 / draws));
    CHECK(var1 == doctest::Approx(0.5).epsilon(0.03));

    // m=4, s=10: posterior N(2, 0.2)
    const Dataset four = dataset_from({2.5, 2.5, 2.5, 2.5});
    double t1 = 0.0, t2 = 0.0;
    for (long t = 0; t < draws; ++t) {
        const double b = sample_heights_given_partition(four, make_partition(4, {}), rng)
                             .heights()[0];
        t1 += b;
        t2 += b * b;
    }
    const double mean4 = t1 / draws, var4 = t2 / draws - mean4 * mean4;
    CHECK(std::fabs(mean4 - 2.0) <= 3.0 * std::sqrt(0.2 / draws));
    CHECK(var4 == doctest::Approx(0.2).epsilon(0.03));
}

TEST_CASE("mcmc_posterior tracks the exact posterior (n=16 smoke)") {
    const StepFunction f0 = StepFunction::from_reals({0.5}, {0.0, 2.0});
    const Dataset d = simulate(f0, 16, 1.0, 321);

    PriorConfig cfg;
    cfg.partition_class = PartitionClass::BI;
    cfg.k_max = 8;

    const PosteriorSummary exact = exact_posterior(d, cfg, 8, 0, 1);
    const PosteriorSummary chain = mcmc_posterior(d, cfg, 200000, 17, 200);

    double tv = 0.0;
    for (int k = 1; k <= 8; ++k) {
        const double pe = exact.posterior_k.count(k) ? exact.posterior_k.at(k) : 0.0;
        const double pm = chain.posterior_k.count(k) ? chain.posterior_k.at(k) : 0.0;
        tv += std::fabs(pe - pm);
    }
    tv *= 0.5;
    CHECK(tv <= 0.05);

    // K stays inside the prior support
    for (const auto& [k, p] : chain.posterior_k) {
        CHECK(k >= 1);
        CHECK(k <= cfg.k_max);
    }

    // identical seeds give identical chains
    const PosteriorSummary again = mcmc_posterior(d, cfg, 200000, 17, 200);
    CHECK(again.posterior_k == chain.posterior_k);
    CHECK(oracle::hash_doubles(again.mean_on_grid) == oracle::hash_doubles(chain.mean_on_grid));
    REQUIRE(again.samples.size() == chain.samples.size());
    for (std::size_t i = 0; i < again.samples.size(); ++i)
        CHECK(oracle::hash_doubles(again.samples[i].heights()) ==
              oracle::hash_doubles(chain.samples[i].heights()));

    CHECK_THROWS_AS(mcmc_posterior(d, PriorConfig{}, 100, 1), std::invalid_argument);  // EB class
}

TEST_CASE("concentration_mass") {
    const StepFunction f0 = StepFunction::from_reals({0.5}, {0.0, 2.0});
    const Dataset d = simulate(f0, 32, 1.0, 5);
    PriorConfig cfg;
    cfg.partition_class = PartitionClass::EB;
    const PosteriorSummary s = exact_posterior(d, cfg, 32, 200, 6);

    CHECK(concentration_mass(s, f0, 0.0, d.grid) == 1.0);
    CHECK(concentration_mass(s, f0, std::numeric_limits<double>::infinity(), d.grid) == 0.0);

    // antitone in the radius
    double prev = 1.0;
    for (double r : {0.1, 0.3, 0.6, 1.0, 2.0}) {
        const double m = concentration_mass(s, f0, r, d.grid);
        CHECK(m <= prev);
        prev = m;
    }

    PosteriorSummary empty;
    CHECK_THROWS_AS(concentration_mass(empty, f0, 0.5, d.grid), std::invalid_argument);
}

TEST_CASE("noiseless representable truth: posterior hugs f0") {
    const StepFunction f0 = StepFunction::from_reals({0.5}, {0.0, 3.0});
    const Dataset d = simulate(f0, 128, 0.0, 1);  // no noise
    PriorConfig cfg;
    cfg.partition_class = PartitionClass::EB;
    const PosteriorSummary s = exact_posterior(d, cfg, 128, 400, 2);
    CHECK(concentration_mass(s, f0, 0.5, d.grid) < 0.05);
}

TEST_CASE("exact_posterior honors the noise_sd escape hatch deterministically") {
    const StepFunction f0 = StepFunction::from_reals({0.5}, {0.0, 2.0});
    Dataset d = simulate(f0, 32, 2.0, 77);
    CHECK(d.noise_sd == 2.0);
    PriorConfig cfg;
    cfg.partition_class = PartitionClass::EB;
    const PosteriorSummary a = exact_posterior(d, cfg, 32, 50, 3);
    const PosteriorSummary b = exact_posterior(d, cfg, 32, 50, 3);
    CHECK(a.diagnostics.noise_scale == 2.0);
    CHECK(oracle::hash_doubles(a.mean_on_grid) == oracle::hash_doubles(b.mean_on_grid));

    // rescaling the data to unit noise by hand gives the same posterior_k
    Dataset scaled = d;
    scaled.noise_sd = 1.0;
    for (double& y : scaled.responses) y /= 2.0;
    const PosteriorSummary c = exact_posterior(scaled, cfg, 32, 50, 3);
    for (const auto& [k, p] : a.posterior_k)
        CHECK(p == doctest::Approx(c.posterior_k.at(k)).epsilon(1e-12));
}
