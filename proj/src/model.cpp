#include "stepreg/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stepreg/rng.hpp"

namespace stepreg {

Grid make_grid(int n) {
    if (n < 1) throw std::invalid_argument("make_grid: n must be >= 1");
    Grid g;
    g.n = n;
    g.points.resize(n);
    for (int i = 0; i < n; ++i) g.points[i] = static_cast<double>(i + 1) / n;
    return g;
}

StepFunction::StepFunction(std::vector<Rat> breakpoints, std::vector<double> heights)
    : breakpoints_(std::move(breakpoints)), heights_(std::move(heights)) {
    if (heights_.size() != breakpoints_.size() + 1)
        throw std::invalid_argument("StepFunction: need len(heights) == len(breakpoints) + 1");
    const Rat zero(0, 1), one(1, 1);
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        if (cmp(breakpoints_[i], zero) <= 0 || cmp(breakpoints_[i], one) >= 0)
            throw std::invalid_argument("StepFunction: breakpoints must lie in (0,1)");
        if (i > 0 && cmp(breakpoints_[i - 1], breakpoints_[i]) >= 0)
            throw std::invalid_argument("StepFunction: breakpoints must be strictly increasing");
    }
}

StepFunction StepFunction::constant(double height) {
    return StepFunction({}, {height});
}

StepFunction StepFunction::on_grid(int n, const std::vector<int>& splits,
                                   std::vector<double> heights) {
    std::vector<Rat> bps;
    bps.reserve(splits.size());
    for (int j : splits) {
        if (j < 1 || j >= n) throw std::invalid_argument("StepFunction::on_grid: split out of range");
        bps.emplace_back(j, n);
    }
    return StepFunction(std::move(bps), std::move(heights));
}

StepFunction StepFunction::from_reals(const std::vector<double>& breakpoints,
                                      std::vector<double> heights) {
    std::vector<Rat> bps;
    bps.reserve(breakpoints.size());
    for (double b : breakpoints) bps.push_back(rat_from_double(b));
    return StepFunction(std::move(bps), std::move(heights));
}

double StepFunction::operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("StepFunction: x outside [0,1]");
    std::size_t k = 0;
    while (k < breakpoints_.size() && x > breakpoints_[k].to_double()) ++k;
    return heights_[k];
}

int StepFunction::cell_index(const Rat& x) const {
    std::size_t lo = 0, hi = breakpoints_.size();
    // first k with x <= breakpoints_[k]
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (cmp(x, breakpoints_[mid]) <= 0)
            hi = mid;
        else
            lo = mid + 1;
    }
    return static_cast<int>(lo);
}

std::vector<double> StepFunction::values_on_grid(const Grid& grid) const {
    std::vector<double> out(grid.n);
    std::size_t k = 0;
    for (int i = 1; i <= grid.n; ++i) {
        while (k < breakpoints_.size() &&
               cmp_frac(i, grid.n, breakpoints_[k].num, breakpoints_[k].den) > 0)
            ++k;
        out[i - 1] = heights_[k];
    }
    return out;
}

StepFunction StepFunction::canonicalize() const {
    std::vector<Rat> bps;
    std::vector<double> hs;
    hs.push_back(heights_[0]);
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
        if (heights_[k + 1] != hs.back()) {
            bps.push_back(breakpoints_[k]);
            hs.push_back(heights_[k + 1]);
        }
    }
    return StepFunction(std::move(bps), std::move(hs));
}

Dataset simulate(const StepFunction& f0, int n, double noise_sd, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
    if (noise_sd < 0) throw std::invalid_argument("simulate: noise_sd must be >= 0");
    Dataset d;
    d.grid = make_grid(n);
    d.seed = seed;
    d.noise_sd = noise_sd;
    d.responses = f0.values_on_grid(d.grid);
    Rng rng(seed);
    for (double& y : d.responses) y += noise_sd * rng.normal();
    return d;
}

double empirical_norm(const std::vector<double>& fx, const std::vector<double>& gx) {
    if (fx.size() != gx.size() || fx.empty())
        throw std::invalid_argument("empirical_norm: size mismatch");
    double ss = 0.0;
    for (std::size_t i = 0; i < fx.size(); ++i) {
        const double d = fx[i] - gx[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(fx.size()));
}

double empirical_norm(const StepFunction& f, const StepFunction& g, const Grid& grid) {
    return empirical_norm(f.values_on_grid(grid), g.values_on_grid(grid));
}

}  // namespace stepreg
