#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "stepreg/model.hpp"
#include "stepreg/rng.hpp"

using namespace stepreg;

TEST_CASE("make_grid produces i/n") {
    const Grid g = make_grid(4);
    REQUIRE(g.n == 4);
    CHECK(g.points[0] == 0.25);
    CHECK(g.points[1] == 0.5);
    CHECK(g.points[2] == 0.75);
    CHECK(g.points[3] == 1.0);

    const Grid single = make_grid(1);
    CHECK(single.points == std::vector<double>{1.0});

    const Grid g10 = make_grid(10);
    for (int i = 1; i < 10; ++i)
        CHECK(g10.points[i] - g10.points[i - 1] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(g10.points.back() == 1.0);

    CHECK_THROWS_AS(make_grid(0), std::invalid_argument);
}

TEST_CASE("evaluate honors the half-open cell convention") {
    const StepFunction c = StepFunction::constant(3.7);
    for (double x : {0.0, 0.25, 1.0}) CHECK(c(x) == 3.7);

    const StepFunction f = StepFunction::from_reals({0.5}, {1.0, 2.0});
    CHECK(f(0.5) == 1.0);
    CHECK(f(0.6) == 2.0);
    CHECK(f(0.0) == 1.0);

    const StepFunction g = StepFunction::from_reals({0.3, 0.7}, {0.0, 5.0, 0.0});
    CHECK(g(0.7) == 5.0);
    CHECK(g(0.7000001) == 0.0);

    CHECK_THROWS_AS(f(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(f(1.1), std::invalid_argument);
}

TEST_CASE("evaluate is constant within each cell") {
    Rng rng(42);
    const StepFunction f = StepFunction::from_reals({0.2, 0.45, 0.8}, {1.0, -2.0, 0.5, 3.0});
    const std::vector<double> edges{0.0, 0.2, 0.45, 0.8, 1.0};
    for (std::size_t cell = 0; cell + 1 < edges.size(); ++cell) {
        const double lo = edges[cell], hi = edges[cell + 1];
        const double ref = f(hi);  // right endpoint belongs to the cell
        for (int t = 0; t < 50; ++t) {
            const double x = lo + (hi - lo) * (rng.uniform01() * 0.999 + 0.0005);
            CHECK(f(x) == ref);
        }
    }
}

TEST_CASE("canonicalize merges equal neighbors") {
    const StepFunction f = StepFunction::from_reals({0.3, 0.6}, {1.0, 1.0, 2.0});
    const StepFunction g = f.canonicalize();
    REQUIRE(g.cell_count() == 2);
    CHECK(g.breakpoints()[0] == Rat(3, 5));
    CHECK(g.heights() == std::vector<double>{1.0, 2.0});

    // idempotence
    const StepFunction h = g.canonicalize();
    CHECK(h.cell_count() == 2);
    CHECK(h.breakpoints() == g.breakpoints());

    // full collapse
    const StepFunction flat = StepFunction::from_reals({0.1, 0.9}, {4.0, 4.0, 4.0}).canonicalize();
    CHECK(flat.cell_count() == 1);

    // evaluation is unchanged everywhere on a fine grid
    const Grid grid = make_grid(97);
    CHECK(f.values_on_grid(grid) == f.canonicalize().values_on_grid(grid));
}

TEST_CASE("simulate: determinism and the noiseless case") {
    const StepFunction f0 = StepFunction::from_reals({0.25, 0.5}, {0.0, 1.0, 0.0});

    const Dataset clean = simulate(f0, 16, 0.0, 99);
    CHECK(clean.responses == f0.values_on_grid(clean.grid));

    const Dataset a = simulate(f0, 64, 1.0, 1234);
    const Dataset b = simulate(f0, 64, 1.0, 1234);
    CHECK(oracle::hash_doubles(a.responses) == oracle::hash_doubles(b.responses));

    const Dataset c = simulate(f0, 64, 1.0, 1235);
    CHECK(a.responses != c.responses);

    CHECK_THROWS_AS(simulate(f0, 0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate(f0, 8, -1.0, 1), std::invalid_argument);
}

TEST_CASE("simulate: residual mean over many seeds is centered") {
    const StepFunction f0 = StepFunction::from_reals({0.5}, {-1.0, 2.0});
    const int n = 100, reps = 1000;
    const double noise_sd = 1.0;
    const Grid grid = make_grid(n);
    const std::vector<double> truth = f0.values_on_grid(grid);
    double total = 0.0;
    for (int r = 0; r < reps; ++r) {
        const Dataset d = simulate(f0, n, noise_sd, derive_seed(2024, r));
        for (int i = 0; i < n; ++i) total += d.responses[i] - truth[i];
    }
    const double count = static_cast<double>(n) * reps;
    CHECK(std::fabs(total / count) <= 3.0 * noise_sd / std::sqrt(count));
}

TEST_CASE("empirical_norm: worked values") {
    const Grid g8 = make_grid(8);
    const StepFunction f0 = StepFunction::from_reals({0.25, 0.5}, {0.0, 1.0, 0.0});
    const StepFunction zero = StepFunction::constant(0.0);
    // f0 is 1 exactly at the grid points 3/8 and 4/8 (0.25 falls in the left cell)
    CHECK(empirical_norm(f0, zero, g8) == doctest::Approx(std::sqrt(2.0 / 8.0)).epsilon(1e-15));

    CHECK(empirical_norm(f0, f0, g8) == 0.0);

    const Grid g5 = make_grid(5);
    CHECK(empirical_norm(StepFunction::constant(2.0), StepFunction::constant(5.0), g5) ==
          doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("empirical_norm is a pseudometric on random triples") {
    Rng rng(7);
    const Grid grid = make_grid(23);
    auto random_step = [&](int k) {
        std::vector<int> splits;
        while (static_cast<int>(splits.size()) < k - 1) {
            const int j = 1 + static_cast<int>(rng.below(22));
            bool dup = false;
            for (int s : splits) dup |= (s == j);
            if (!dup) splits.push_back(j);
        }
        std::sort(splits.begin(), splits.end());
        std::vector<double> h;
        for (int i = 0; i < k; ++i) h.push_back(rng.normal());
        return StepFunction::on_grid(23, splits, h);
    };
    for (int trial = 0; trial < 30; ++trial) {
        const StepFunction a = random_step(1 + trial % 5);
        const StepFunction b = random_step(1 + (trial + 2) % 5);
        const StepFunction c = random_step(1 + (trial + 3) % 5);
        const double ab = empirical_norm(a, b, grid);
        const double ba = empirical_norm(b, a, grid);
        const double ac = empirical_norm(a, c, grid);
        const double cb = empirical_norm(c, b, grid);
        CHECK(ab == ba);
        CHECK(ab <= ac + cb + 1e-12);
        CHECK(empirical_norm(a, a, grid) == 0.0);
        // canonicalization never changes the norm
        CHECK(empirical_norm(a.canonicalize(), b, grid) == ab);
    }
}

TEST_CASE("grid-aligned breakpoints survive a double round trip") {
    // from_reals must recover j/n exactly from its double image
    for (int n : {8, 10, 12, 640}) {
        for (int j = 1; j < n; j += std::max(1, n / 7)) {
            const double x = static_cast<double>(j) / n;
            const Rat r = rat_from_double(x);
            CHECK(cmp(r, Rat(j, n)) == 0);
        }
    }
}
