#pragma once

// Step distribution functions, atomic measures, and the comparisons used to
// study convergence of eigenvalue counting functions.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ids {

// Left-continuous nondecreasing step function
//   N(x) = base + sum of jump weights at locations strictly below x.
// Locations are strictly increasing, weights strictly positive.
class DistributionFunction {
public:
    struct Jump {
        double location;
        double weight;
    };

    DistributionFunction() = default;

    // Jumps at equal locations are merged; zero weights are dropped.
    // Throws DomainError on negative weights or a negative base.
    static DistributionFunction from_jumps(std::vector<Jump> jumps, double base = 0.0);

    // Value cumulative[k] just after locations[k]; both strictly increasing.
    static DistributionFunction from_cumulative(std::vector<double> locations, std::vector<double> cumulative,
                                                double base = 0.0);

    // sum_i coefficient_i * parts_i (coefficients must be nonnegative).
    static DistributionFunction mixture(std::span<const DistributionFunction> parts,
                                        std::span<const double> coefficients);

    double operator()(double x) const noexcept;
    // Value just to the right of x (includes a jump located at x).
    double right_limit(double x) const noexcept;

    double base() const noexcept { return base_; }
    double total() const noexcept { return cumulative_.empty() ? base_ : cumulative_.back(); }
    double jump_mass() const noexcept { return total() - base_; }
    std::size_t jump_count() const noexcept { return locations_.size(); }
    std::span<const double> locations() const noexcept { return locations_; }
    // Cumulative value after jump k.
    std::span<const double> cumulative() const noexcept { return cumulative_; }
    double weight(std::size_t k) const noexcept;
    std::vector<Jump> jumps() const;

    DistributionFunction scaled(double factor) const;
    DistributionFunction shifted(double delta) const;
    DistributionFunction with_base(double base) const;

    // CSV rows "lambda,N_left,N_right" at each jump location.
    std::string to_csv() const;

private:
    double base_ = 0.0;
    std::vector<double> locations_;
    std::vector<double> cumulative_;
};

// Finite sum of point masses with strictly increasing locations.
class AtomicMeasure {
public:
    struct Atom {
        double location;
        double weight;
    };

    AtomicMeasure() = default;
    // Sorts, merges equal locations, rejects non-positive weights.
    explicit AtomicMeasure(std::vector<Atom> atoms);

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }
    double total() const noexcept { return total_; }

    DistributionFunction distribution() const;
    std::string to_csv() const;

private:
    std::vector<Atom> atoms_;
    double total_ = 0.0;
};

// N(x) = #{i : eigs_i < x} / normalization. Eigenvalues closer than
// merge_tolerance * (spectral width) to the first member of their run are
// merged into a single jump placed at that first member.
DistributionFunction counting_function(std::span<const double> eigenvalues, double normalization,
                                       double merge_tolerance = 1e-8);

// Stieltjes sum  sum_jumps exp(-t * location) * weight.
double laplace_transform(const DistributionFunction& n, double t);

// max over the grid of |L1(t) - L2(t)|.
double laplace_agreement(const DistributionFunction& a, const DistributionFunction& b,
                         std::span<const double> t_grid);

// Locations of jump clusters carrying at least mass_floor: jumps closer than
// cluster_width to the previous one are pooled.
std::vector<double> significant_jumps(const DistributionFunction& n, double cluster_width, double mass_floor);

struct CdfDistanceOptions {
    // Grid points closer than this to a counted jump are not admitted.
    double jump_tolerance = 1e-9;
    // Only jump clusters of at least this mass are counted (0 = every jump).
    double jump_mass_floor = 0.0;
    double cluster_width = 0.0;
};

struct CdfDistance {
    double sup_gap = 0.0;
    double argmax = 0.0;
    std::vector<double> excluded;
    std::size_t admitted = 0;
};

// Sup of |N1 - N2| over admitted grid points. DegeneracyError if none is admitted.
CdfDistance cdf_distance(const DistributionFunction& a, const DistributionFunction& b,
                         std::span<const double> grid, const CdfDistanceOptions& options = {});

struct PointPart {
    AtomicMeasure atoms;
    // Intervals picked by the greedy cover (k_max of them or fewer if mass runs out).
    std::vector<std::pair<double, double>> intervals;
    double greedy_mass = 0.0;
    // Exact supremum of the mass captured by k_max disjoint intervals of
    // length <= length_floor (dynamic programme over the sorted jumps).
    double optimal_mass = 0.0;
    double largest_interval_mass = 0.0;
    // greedy_mass >= optimal_mass - largest_interval_mass
    bool certified = false;
};

// Finite-resolution point part: greedily selects up to k_max disjoint
// intervals of length <= length_floor of maximal mass and emits one atom per
// interval whose mass is at least mass_floor, located at the mass centroid.
PointPart point_part(const DistributionFunction& n, int k_max, double length_floor, double mass_floor);

std::vector<double> linspace(double lo, double hi, std::size_t points);

}  // namespace ids
