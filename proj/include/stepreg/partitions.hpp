#ifndef STEPREG_PARTITIONS_HPP
#define STEPREG_PARTITIONS_HPP

#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stepreg/model.hpp"
#include "stepreg/rational.hpp"
#include "stepreg/rng.hpp"

namespace stepreg {

using BigInt = boost::multiprecision::cpp_int;

enum class PartitionKind { EquivalentBlock, BalancedInterval };

// Interval partition of (0,1] induced by split indices drawn from the
// interior grid points: cell k is (x_{j_{k-1}}, x_{j_k}] with j_0 = 0 and
// j_K = n. Splits are kept as integers; widths are exact multiples of 1/n.
struct Partition {
    int n = 0;
    std::vector<int> splits;  // strictly increasing, in {1,...,n-1}
    PartitionKind kind = PartitionKind::BalancedInterval;

    int cells() const { return static_cast<int>(splits.size()) + 1; }

    // Cell widths in grid units; they sum to n.
    std::vector<int> widths() const;
};

// Validates invariants and returns the partition.
Partition make_partition(int n, std::vector<int> splits,
                         PartitionKind kind = PartitionKind::BalancedInterval);

// Cell-proportion bounds C^2_min/K <= mu(Omega_k) <= C^2_max/K. The
// thresholds are exact rationals; doubles passed in are rationalized, so
// defaults like 0.5 and 2.0 stay exact.
struct BalanceConstraint {
    Rat c_min_sq{1, 2};
    Rat c_max_sq{2, 1};

    BalanceConstraint() = default;
    BalanceConstraint(double cmin_sq, double cmax_sq);
    BalanceConstraint(Rat cmin_sq, Rat cmax_sq);
};

// A pure minimum-width constraint |Omega_k| >= a/n for a K-partition,
// expressed through the cell-proportion form (upper bound vacuous).
BalanceConstraint min_width_constraint(int n, int K, int a);

// Inclusive integer width bounds [lo, hi] (grid units) equivalent to the
// balance condition for a K-partition of n points; lo > hi means empty set.
struct WidthBounds {
    long lo = 1;
    long hi = 0;
    bool empty() const { return lo > hi; }
};
WidthBounds balanced_width_bounds(int n, int K, const BalanceConstraint& bc);

// The unique K-partition whose cells each hold exactly n/K design points.
// Throws std::domain_error when K does not divide n unless nearly_equal is
// set, in which case the remainder is spread one point at a time over the
// leftmost cells (result tagged BalancedInterval since counts differ).
Partition equivalent_blocks(int n, int K, bool nearly_equal = false);

// mu(Omega_k): proportion of design points in each cell.
std::vector<double> cell_counts(const Partition& p, const Grid& grid);

bool is_balanced(const Partition& p, const BalanceConstraint& bc, const Grid& grid);

// Streams all strictly increasing (K-1)-subsets of {1,...,n-1} in colex
// order, optionally filtered by a balance constraint. O(K) state.
class PartitionEnumerator {
public:
    PartitionEnumerator(int n, int K, std::optional<BalanceConstraint> bc = std::nullopt);
    std::optional<Partition> next();

private:
    bool admissible() const;
    int n_, K_;
    std::optional<WidthBounds> bounds_;
    std::vector<int> current_;
    bool done_ = false;
    bool first_ = true;
};

// Convenience: materialize the (filtered) enumeration. Small n only.
std::vector<Partition> enumerate_partitions(int n, int K,
                                            std::optional<BalanceConstraint> bc = std::nullopt);

// Exact cardinality of the admissible set: C(n-1, K-1) without a
// constraint, otherwise the number of compositions of n into K parts
// inside the balanced width bounds (inclusion-exclusion, exact integers).
BigInt count_balanced(int n, int K, std::optional<BalanceConstraint> bc = std::nullopt);

// Uniform (K-1)-subset of {1,...,n-1}: partial Fisher-Yates, then sort.
Partition sample_uniform_splits(int n, int K, Rng& rng);

struct BalancedDraw {
    Partition partition;
    long attempts = 0;
};

// Uniform draw from the balanced set by rejection from the uniform split
// distribution. Throws NoBalancedPartitionError when the set is empty and
// TooLargeError past the attempt cap.
BalancedDraw sample_balanced_partition(int n, int K, const BalanceConstraint& bc, Rng& rng,
                                       long max_attempts = 1000000);

}  // namespace stepreg

#endif
