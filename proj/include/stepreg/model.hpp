#ifndef STEPREG_MODEL_HPP
#define STEPREG_MODEL_HPP

#include <cstdint>
#include <vector>

#include "stepreg/rational.hpp"

namespace stepreg {

// Fixed equispaced design x_i = i/n, i = 1..n. Interior points x_1..x_{n-1}
// double as the candidate split locations.
struct Grid {
    int n = 0;
    std::vector<double> points;
};

Grid make_grid(int n);

// Piecewise constant function on (0,1]: cells are the half-open intervals
// (u_{k-1}, u_k] with u_0 = 0 and u_K = 1, one height per cell. Breakpoints
// are exact rationals so that cell membership of grid points never hinges
// on floating-point rounding; they become doubles only at evaluation.
class StepFunction {
public:
    StepFunction(std::vector<Rat> breakpoints, std::vector<double> heights);

    static StepFunction constant(double height);

    // Breakpoints at grid indices j/n, one height per resulting cell.
    static StepFunction on_grid(int n, const std::vector<int>& splits,
                                std::vector<double> heights);

    // Breakpoints given as reals (e.g. parsed from JSON); each is snapped to
    // the closest small-denominator rational via rat_from_double.
    static StepFunction from_reals(const std::vector<double>& breakpoints,
                                   std::vector<double> heights);

    int cell_count() const { return static_cast<int>(heights_.size()); }
    const std::vector<Rat>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& heights() const { return heights_; }

    // Height of the cell containing x, for x in [0,1]; f(0) = heights[0]
    // (0 is never a design point, so the convention is free).
    double operator()(double x) const;

    // Exact variants used by norms and fits.
    int cell_index(const Rat& x) const;
    double value_at(const Rat& x) const { return heights_[cell_index(x)]; }

    // f(x_i) for all grid points, one O(n + K) sweep with exact comparisons.
    std::vector<double> values_on_grid(const Grid& grid) const;

    // Merge adjacent cells with equal heights; pointwise identical result.
    StepFunction canonicalize() const;

private:
    std::vector<Rat> breakpoints_;   // strictly increasing, in (0,1)
    std::vector<double> heights_;    // size breakpoints_.size() + 1
};

struct Dataset {
    Grid grid;
    std::vector<double> responses;
    std::uint64_t seed = 0;
    double noise_sd = 1.0;
};

// Y_i = f0(x_i) + noise_sd * z_i with z_i iid standard normal from the
// seeded stream. Identical arguments give bit-identical responses.
Dataset simulate(const StepFunction& f0, int n, double noise_sd, std::uint64_t seed);

// Root mean square distance over the design points.
double empirical_norm(const StepFunction& f, const StepFunction& g, const Grid& grid);

// Same norm between two functions already tabulated on the grid.
double empirical_norm(const std::vector<double>& fx, const std::vector<double>& gx);

}  // namespace stepreg

#endif
