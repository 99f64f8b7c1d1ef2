#pragma once

// Finite Delone sets in one and two dimensions and the Voronoi
// nearest-neighbour relation between their points.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ids/lattice.hpp"
#include "ids/predicates.hpp"

namespace ids {

using geometry::Point2;

// Half-open box [lo, hi) in 1 or 2 dimensions (axis 1 unused in 1D).
struct Window {
    int dimension = 2;
    Point2 lo{0.0, 0.0};
    Point2 hi{0.0, 0.0};

    double volume() const noexcept;
    bool contains(const Point2& p) const noexcept;
};

struct DeloneCertificate {
    double r_packing = 0.0;   // exact minimum pairwise distance
    double R_covering = 0.0;  // largest probe-to-nearest-point distance
    double probe_pitch = 0.0; // 0 when computed exactly (1D)
};

struct DeloneSet {
    int dimension = 2;
    std::vector<Point2> points;  // 1D sets use {x, 0}
    Window window;
    double r_packing = 0.0;
    double R_covering = 0.0;
};

// Validates (points, window) and returns the (r, R) certificate.
// r is the exact minimum pairwise distance. In 1D R is exact: the largest
// distance from a point of the window to the set. In 2D R is the maximum over
// a probe grid aligned with window.lo, closed under the window edges, with a
// power-of-two pitch <= R/4; the true covering radius is at most
// R + pitch/sqrt(2). DegeneracyError on coincident points.
DeloneCertificate validate_delone(std::span<const Point2> points, const Window& window);

DeloneSet make_delone_set(int dimension, std::vector<Point2> points, const Window& window);

// x_n = n + floor(n / phi + phase) * (phi - 1), n = 0..length-1.
DeloneSet fibonacci_chain(std::size_t length, double phase = 0.0);
// Consecutive gaps of the chain from its integer coding; each is 1 or phi.
std::vector<double> fibonacci_gaps(std::size_t length, double phase = 0.0);

// Z^2 ∩ box with each point displaced uniformly in [-amplitude, amplitude]^2,
// keyed by (seed, lattice coordinate). Window = box sites ± 1/2.
DeloneSet perturbed_lattice(const LatticeBox& box, double amplitude, std::uint64_t seed);

struct VoronoiAdjacency {
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j, sorted
    std::vector<bool> boundary;                              // cell leaves the window or is unbounded
    // Quadruples whose exact in-circle determinant vanished and that the
    // symbolic perturbation resolved.
    std::vector<std::array<std::size_t, 4>> cocircular;
    // Delaunay edges dropped because their dual Voronoi face had length
    // <= 1e-9 * r_packing.
    std::size_t filtered_edges = 0;

    std::vector<std::vector<std::size_t>> neighbours() const;
};

// 1D: consecutive points. 2D: Delaunay triangulation (Bowyer-Watson with
// exact predicates and index-ordered symbolic perturbation), keeping edges
// whose Voronoi face has positive length.
VoronoiAdjacency voronoi_adjacency(const DeloneSet& set);

double point_density(const DeloneSet& set, const Window& window);

std::string delone_to_csv(const DeloneSet& set);
std::string delone_to_json(const DeloneSet& set);
DeloneSet delone_from_json(const std::string& text);
// One coordinate vector per line; window and certificate recomputed.
DeloneSet delone_from_csv(const std::string& text, const Window& window);

}  // namespace ids
