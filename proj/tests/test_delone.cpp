#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

#include "ids/delone.hpp"
#include "ids/errors.hpp"
#include "ids/predicates.hpp"

using namespace ids;

namespace {

constexpr double kPhi = std::numbers::phi;

using Polygon = std::vector<Point2>;

// Keeps the part of `poly` with (x - m) . n <= 0.
Polygon clip(const Polygon& poly, Point2 m, Point2 n) {
    auto side = [&](const Point2& x) { return (x[0] - m[0]) * n[0] + (x[1] - m[1]) * n[1]; };
    Polygon out;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point2& a = poly[k];
        const Point2& b = poly[(k + 1) % poly.size()];
        double sa = side(a), sb = side(b);
        if (sa <= 0) out.push_back(a);
        if ((sa < 0 && sb > 0) || (sa > 0 && sb < 0)) {
            double s = sa / (sa - sb);
            out.push_back({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
        }
    }
    return out;
}

// Face-sharing pairs from explicitly clipped Voronoi cells inside a large frame.
std::set<std::pair<std::size_t, std::size_t>> clipped_cell_faces(const std::vector<Point2>& pts, double min_face) {
    const double big = 1e4;
    std::set<std::pair<std::size_t, std::size_t>> faces;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Polygon cell{{-big, -big}, {big, -big}, {big, big}, {-big, big}};
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j == i) continue;
            Point2 m{0.5 * (pts[i][0] + pts[j][0]), 0.5 * (pts[i][1] + pts[j][1])};
            cell = clip(cell, m, {pts[j][0] - pts[i][0], pts[j][1] - pts[i][1]});
        }
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j == i) continue;
            Point2 n{pts[j][0] - pts[i][0], pts[j][1] - pts[i][1]};
            double norm = std::hypot(n[0], n[1]);
            Point2 m{0.5 * (pts[i][0] + pts[j][0]), 0.5 * (pts[i][1] + pts[j][1])};
            auto on = [&](const Point2& x) { return std::abs((x[0] - m[0]) * n[0] + (x[1] - m[1]) * n[1]) / norm < 1e-9; };
            double length = 0.0;
            for (std::size_t k = 0; k < cell.size(); ++k) {
                const Point2& a = cell[k];
                const Point2& b = cell[(k + 1) % cell.size()];
                if (on(a) && on(b)) length += std::hypot(b[0] - a[0], b[1] - a[1]);
            }
            if (length > min_face) faces.insert({std::min(i, j), std::max(i, j)});
        }
    }
    return faces;
}

double brute_min_distance(const std::vector<Point2>& pts) {
    double best = INFINITY;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            best = std::min(best, std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("unit square corners") {
    Window w{2, {0.0, 0.0}, {1.0, 1.0}};
    auto cert = validate_delone(std::vector<Point2>{{0, 0}, {1, 0}, {0, 1}, {1, 1}}, w);
    CHECK(cert.r_packing == 1.0);
    CHECK(cert.R_covering == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("duplicate points are degenerate") {
    Window w{2, {0.0, 0.0}, {2.0, 2.0}};
    CHECK_THROWS_AS(validate_delone(std::vector<Point2>{{0.5, 0.5}, {0.5, 0.5}}, w), DegeneracyError);
    CHECK_THROWS_AS(validate_delone(std::vector<Point2>{{0.5, 0.5}}, w), DomainError);
}

TEST_CASE("Fibonacci gaps take two values") {
    for (double phase : {0.0, 0.1, 0.37, 0.99}) {
        for (std::size_t length : {2u, 3u, 17u, 1000u}) {
            auto chain = fibonacci_chain(length, phase);
            for (std::size_t i = 1; i < length; ++i) {
                double gap = chain.points[i][0] - chain.points[i - 1][0];
                CHECK((std::abs(gap - 1.0) < 1e-12 || std::abs(gap - kPhi) < 1e-12));
            }
            for (double g : fibonacci_gaps(length, phase)) CHECK((g == 1.0 || std::abs(g - kPhi) < 1e-12));
        }
    }
}

TEST_CASE("Fibonacci certificate") {
    auto chain = fibonacci_chain(500, 0.0);
    double max_gap = 0.0, min_gap = INFINITY;
    for (std::size_t i = 1; i < chain.points.size(); ++i) {
        double g = chain.points[i][0] - chain.points[i - 1][0];
        max_gap = std::max(max_gap, g);
        min_gap = std::min(min_gap, g);
    }
    CHECK(chain.r_packing == doctest::Approx(min_gap).epsilon(1e-14));
    CHECK(chain.r_packing == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chain.R_covering == doctest::Approx(max_gap / 2).epsilon(1e-12));
    CHECK(chain.R_covering == doctest::Approx(kPhi / 2).epsilon(1e-12));

    auto two = fibonacci_chain(2, 0.5);
    double gap = two.points[1][0] - two.points[0][0];
    CHECK(two.R_covering == doctest::Approx(gap / 2));
    CHECK_THROWS_AS(fibonacci_chain(1), DomainError);
    CHECK_THROWS_AS(fibonacci_chain(10, 1.0), DomainError);
}

TEST_CASE("Fibonacci density is window- and phase-independent") {
    // The coding k_n grows at rate 1/phi, so the mean gap is 1 + (phi - 1)/phi.
    const double expected = 1.0 / (1.0 + (kPhi - 1.0) / kPhi);
    std::vector<double> densities;
    for (double phase : {0.0, 0.25, 0.5, 0.75}) {
        auto chain = fibonacci_chain(100000, phase);
        densities.push_back(point_density(chain, chain.window));
        CHECK(std::abs(densities.back() - expected) < 1e-3);
    }
    CHECK(*std::max_element(densities.begin(), densities.end()) - *std::min_element(densities.begin(), densities.end()) < 1e-3);

    auto chain = fibonacci_chain(100000, 0.0);
    const double L = 30000.0;
    Window a{1, {100.0, 0.0}, {100.0 + L, 0.0}};
    Window b{1, {40000.0, 0.0}, {40000.0 + L, 0.0}};
    CHECK(std::abs(point_density(chain, a) - point_density(chain, b)) <= 2.0 / L);
}

TEST_CASE("perturbed lattice") {
    auto box = LatticeBox::cube(2, 6);
    auto exact = perturbed_lattice(box, 0.0, 1);
    CHECK(exact.r_packing == 1.0);
    CHECK(exact.R_covering == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    auto wobbly = perturbed_lattice(LatticeBox::cube(2, 20), 0.2, 5);
    CHECK(wobbly.r_packing >= 0.6);
    CHECK(wobbly.r_packing == doctest::Approx(brute_min_distance(wobbly.points)).epsilon(1e-14));
    auto again = perturbed_lattice(LatticeBox::cube(2, 20), 0.2, 5);
    CHECK(again.points == wobbly.points);

    CHECK_THROWS_AS(perturbed_lattice(box, 0.5, 1), DomainError);
}

TEST_CASE("square lattice interior points have four face neighbours") {
    auto set = perturbed_lattice(LatticeBox::cube(2, 7), 0.0, 0);
    auto adj = voronoi_adjacency(set);
    auto nb = adj.neighbours();
    CHECK_FALSE(adj.cocircular.empty());
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        if (adj.boundary[i]) continue;
        REQUIRE(nb[i].size() == 4);
        for (auto j : nb[i]) {
            double d = std::hypot(set.points[i][0] - set.points[j][0], set.points[i][1] - set.points[j][1]);
            CHECK(d == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("triangle: every pair adjacent") {
    Window w{2, {-1.0, -1.0}, {3.0, 3.0}};
    auto set = make_delone_set(2, {{0, 0}, {2, 0.3}, {0.4, 1.7}}, w);
    auto adj = voronoi_adjacency(set);
    CHECK(adj.edges == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("1D adjacency links consecutive points") {
    Window w{1, {0.0, 0.0}, {10.0, 0.0}};
    auto set = make_delone_set(1, {{5.0, 0}, {1.0, 0}, {3.5, 0}, {8.0, 0}}, w);
    auto adj = voronoi_adjacency(set);
    CHECK(adj.edges == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {0, 3}, {1, 2}});
}

TEST_CASE("Delaunay neighbours agree with clipped Voronoi cells") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto set = perturbed_lattice(LatticeBox::cube(2, 7), 0.3, seed);
        auto adj = voronoi_adjacency(set);
        auto faces = clipped_cell_faces(set.points, 1e-9 * set.r_packing);
        auto nb = adj.neighbours();
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            if (adj.boundary[i]) continue;
            std::vector<std::size_t> oracle;
            for (auto [a, b] : faces) {
                if (a == i) oracle.push_back(b);
                if (b == i) oracle.push_back(a);
            }
            std::sort(oracle.begin(), oracle.end());
            CHECK(nb[i] == oracle);
        }
    }
}

TEST_CASE("adjacency is invariant under rigid motions") {
    auto set = perturbed_lattice(LatticeBox::cube(2, 8), 0.25, 11);
    auto base = voronoi_adjacency(set);
    const double c = std::cos(0.7), s = std::sin(0.7);
    std::vector<Point2> moved;
    for (const auto& p : set.points) moved.push_back({c * p[0] - s * p[1] + 13.25, s * p[0] + c * p[1] - 4.5});
    Window w{2, {-10.0, -20.0}, {30.0, 20.0}};
    auto other = voronoi_adjacency(make_delone_set(2, moved, w));
    CHECK(other.edges == base.edges);
}

TEST_CASE("mean interior degree of a perturbed lattice") {
    auto set = perturbed_lattice(LatticeBox::cube(2, 30), 0.2, 17);
    auto adj = voronoi_adjacency(set);
    auto nb = adj.neighbours();
    double total = 0.0;
    std::size_t interior = 0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
        if (adj.boundary[i]) continue;
        total += nb[i].size();
        ++interior;
    }
    REQUIRE(interior > 700);
    CHECK(std::abs(total / interior - 6.0) <= 0.1);
}

TEST_CASE("point density examples") {
    auto lattice = perturbed_lattice(LatticeBox(2, std::vector<int>{10, 10}, std::vector<int>{0, 0}), 0.0, 0);
    CHECK(point_density(lattice, lattice.window) == doctest::Approx(1.0));

    std::vector<Point2> half;
    for (const auto& p : lattice.points) {
        if (static_cast<int>(p[0]) % 2 == 0) half.push_back(p);
    }
    auto thinned = make_delone_set(2, half, lattice.window);
    CHECK(point_density(thinned, thinned.window) == doctest::Approx(0.5));
    CHECK_THROWS_AS(point_density(thinned, Window{2, {0, 0}, {0, 3}}), DomainError);
}

TEST_CASE("Delone serialization round trips") {
    auto set = perturbed_lattice(LatticeBox::cube(2, 5), 0.2, 9);
    auto back = delone_from_json(delone_to_json(set));
    CHECK(back.points == set.points);
    CHECK(back.r_packing == set.r_packing);
    CHECK(back.R_covering == set.R_covering);
    auto csv = delone_from_csv(delone_to_csv(set), set.window);
    CHECK(csv.points == set.points);
}
