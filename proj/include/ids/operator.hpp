#pragma once

// Finite real symmetric operators on labelled sites: percolation adjacency and
// Laplacian, Anderson-type operators, Voronoi nearest-neighbour operators on
// Delone sets, Dirichlet restrictions, heat semigroups and localized traces.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ids/distribution.hpp"
#include "ids/lattice.hpp"

namespace ids {

struct VoronoiAdjacency;

// Full diagonalization is only attempted on blocks up to this many sites.
inline constexpr std::size_t kDenseThreshold = 4096;

enum class LabelKind { lattice, point };

class SymmetricOperator {
public:
    struct Entry {
        std::size_t row;
        std::size_t col;  // row <= col
        double value;
    };

    SymmetricOperator() = default;
    // `entries` may list either triangle; duplicates are summed. Entries with
    // row > col are mirrored, so entry(i,j) == entry(j,i) exactly.
    SymmetricOperator(std::vector<Coord> labels, LabelKind kind, std::vector<Entry> entries, int hopping_range);

    std::size_t dimension() const noexcept { return labels_.size(); }
    std::span<const Coord> labels() const noexcept { return labels_; }
    LabelKind label_kind() const noexcept { return kind_; }
    int hopping_range() const noexcept { return hopping_range_; }
    // Upper triangle (row <= col), sorted by (row, col), no zeros.
    std::span<const Entry> entries() const noexcept { return entries_; }

    double entry(std::size_t i, std::size_t j) const;
    // Position of a label, or dimension() if absent.
    std::size_t find(const Coord& label) const;

    Eigen::MatrixXd dense() const;
    // Connected components of the nonzero pattern; each list is increasing.
    std::vector<std::vector<std::size_t>> blocks() const;
    // Principal submatrix on `sites` (in the given order).
    SymmetricOperator principal(std::span<const std::size_t> sites) const;

    double max_abs_row_sum() const;
    // Set by restrict() when the region missed every site.
    bool empty_region() const noexcept { return empty_region_; }

    // Coordinate-format export: a JSON header line, then "i j value" rows
    // for the upper triangle.
    std::string to_coordinate_text() const;

private:
    friend SymmetricOperator restrict(const SymmetricOperator&, const std::function<bool(const Coord&)>&);

    std::vector<Coord> labels_;
    LabelKind kind_ = LabelKind::lattice;
    std::vector<Entry> entries_;
    int hopping_range_ = 0;
    std::vector<std::size_t> sorted_by_label_;
    bool empty_region_ = false;
};

// Adjacency matrix of the subgraph induced by the occupied sites. Labels are
// the occupied coordinates in box index order.
SymmetricOperator adjacency_operator(const PercolationConfig& config, BoundaryMode mode = BoundaryMode::open);

// Graph Laplacian Deg - A of the induced subgraph (within-cluster degrees).
SymmetricOperator laplacian_operator(const PercolationConfig& config, BoundaryMode mode = BoundaryMode::open);

// hopping * (nearest-neighbour adjacency) + diag(V), V_x i.i.d. uniform on
// [low, high] keyed by (seed, global coordinate).
SymmetricOperator anderson_operator(const LatticeBox& box, double potential_low, double potential_high,
                                    double hopping, std::uint64_t seed, BoundaryMode mode = BoundaryMode::open);

double anderson_potential(double low, double high, std::uint64_t seed, const Coord& site) noexcept;

enum class CellMode { drop_boundary, keep_boundary };

// 0/1 matrix of the Voronoi face relation. Labels are {point index, 0, 0}.
SymmetricOperator delone_operator(const VoronoiAdjacency& adjacency, CellMode mode = CellMode::drop_boundary);

// Dirichlet restriction: principal submatrix on the sites satisfying `region`.
SymmetricOperator restrict(const SymmetricOperator& op, const std::function<bool(const Coord&)>& region);
SymmetricOperator restrict(const SymmetricOperator& op, const LatticeBox& box);

// Spectral functions admitted at configuration boundaries.
struct IndicatorBelow {
    double lambda;  // F(x) = 1 for x < lambda
};
struct Exponential {
    double t;
    double shift = 0.0;  // F(x) = exp(-t (x + shift))
};
struct Polynomial {
    std::vector<double> coefficients;  // c0 + c1 x + ...
};
struct PiecewiseLinear {
    std::vector<double> knots;   // increasing; F vanishes outside [front, back]
    std::vector<double> values;  // F(knots[i]); first and last must be 0
};
using SpectralFunction = std::variant<IndicatorBelow, Exponential, Polynomial, PiecewiseLinear>;

double evaluate(const SpectralFunction& f, double x);
void validate(const SpectralFunction& f);

// e^{-tH} via full spectral decomposition.
Eigen::MatrixXd heat_semigroup(const SymmetricOperator& op, double t);

// tr(chi_D F(H)) = sum over domain sites present in op of <delta_x, F(H) delta_x>.
double localized_trace(const SpectralFunction& f, const SymmetricOperator& op, std::span<const Coord> domain);

// Spectral measure of chi_D: jumps of weight sum_{x in D} |v_k(x)|^2 at each
// eigenvalue lambda_k, so that localized_trace(IndicatorBelow{l}) equals its
// value at l.
DistributionFunction localized_spectral_distribution(const SymmetricOperator& op, std::span<const Coord> domain);

}  // namespace ids
