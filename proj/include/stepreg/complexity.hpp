#ifndef STEPREG_COMPLEXITY_HPP
#define STEPREG_COMPLEXITY_HPP

#include <optional>
#include <vector>

#include "stepreg/model.hpp"
#include "stepreg/partitions.hpp"

namespace stepreg {

// Smallest partition size in a class that covers f0 with every cell inside
// a single true cell. `k == nullopt` means no such size <= cap exists.
struct ComplexityResult {
    std::optional<int> k;
    int cap = 0;
    std::vector<Rat> witness;  // breakpoints of a zero-error partition when k is finite
};

// Number of cells of f0 that intersect the half-open interval (lo, hi].
int restricted_cell_count(const Rat& lo, const Rat& hi, const StepFunction& f0);

// Complexity w.r.t. equispaced blocks: smallest K <= cap such that every
// breakpoint of f0 is an integer multiple of 1/K (linear scan, exact
// rational divisibility). Independent of the sample size.
ComplexityResult complexity_eb(const StepFunction& f0, int n, int cap);

// Complexity w.r.t. balanced intervals on the n-grid. Requires every
// breakpoint of f0 to lie on the grid (OffGridError otherwise). For each K
// feasibility reduces to choosing how many balanced cells each true cell is
// cut into; widths stay integers throughout.
ComplexityResult complexity_bi(const StepFunction& f0, int n, const BalanceConstraint& bc,
                               int cap);

// L2(P_n)-projection of f0 onto step functions supported on p: each height
// is the mean of f0 over the design points of that cell.
StepFunction best_l2_approx(const StepFunction& f0, const Partition& p, const Grid& grid);

}  // namespace stepreg

#endif
