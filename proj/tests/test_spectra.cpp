#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "ids/distribution.hpp"
#include "ids/errors.hpp"
#include "ids/lattice.hpp"
#include "ids/operator.hpp"
#include "ids/spectra.hpp"

using namespace ids;

namespace {

using Jumps = std::vector<DistributionFunction::Jump>;

DistributionFunction lebesgue_grid(std::size_t n, double weight) {
    Jumps j;
    for (std::size_t k = 0; k < n; ++k) j.push_back({(k + 0.5) / n, weight});
    return DistributionFunction::from_jumps(j);
}

struct Interval {
    std::size_t first, last;
    double mass;
};

// Every interval [loc_i, loc_j] of span <= length, by direct enumeration.
std::vector<Interval> all_intervals(const DistributionFunction& n, double length) {
    std::vector<Interval> out;
    auto loc = n.locations();
    for (std::size_t i = 0; i < loc.size(); ++i) {
        double mass = 0.0;
        for (std::size_t j = i; j < loc.size() && loc[j] - loc[i] <= length; ++j) {
            mass += n.weight(j);
            out.push_back({i, j, mass});
        }
    }
    return out;
}

// Best total mass of at most k pairwise disjoint intervals, by exhaustive search.
double brute_k_interval_mass(const std::vector<Interval>& intervals, int k, std::size_t from = 0) {
    if (k == 0) return 0.0;
    double best = 0.0;
    for (const Interval& iv : intervals) {
        if (iv.first < from) continue;
        best = std::max(best, iv.mass + brute_k_interval_mass(intervals, k - 1, iv.last + 1));
    }
    return best;
}

}  // namespace

TEST_CASE("zero matrix") {
    auto box = LatticeBox(1, std::vector<int>{6}, std::vector<int>{0});
    auto values = eigenvalues(anderson_operator(box, 0.0, 0.0, 0.0, 0));
    CHECK(values == std::vector<double>(6, 0.0));
}

TEST_CASE("trace identity and residuals") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto op = anderson_operator(LatticeBox::cube(2, 15), -3.0, 3.0, 1.0, seed);
        auto values = eigenvalues(op);
        double trace = op.dense().trace(), sum = 0.0;
        for (double v : values) sum += v;
        CHECK(std::abs(sum - trace) <= 1e-9 * std::max(1.0, std::abs(trace)));
        CHECK(std::is_sorted(values.begin(), values.end()));
        CHECK(max_relative_residual(op, eigensystem(op)) <= 1e-9);
    }
}

TEST_CASE("residuals on a large percolation operator") {
    auto op = adjacency_operator(sample_percolation(LatticeBox::cube(2, 24), 0.8, 3));
    CHECK(max_relative_residual(op, eigensystem(op)) <= 1e-9);
}

TEST_CASE("eigenvalues match dense reference on a block-diagonal operator") {
    auto cfg = sample_percolation(LatticeBox::cube(2, 16), 0.45, 19);
    auto op = adjacency_operator(cfg);
    auto blocks = op.blocks();
    CHECK(blocks.size() > 5);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(op.dense(), Eigen::EigenvaluesOnly);
    auto values = eigenvalues(op);
    REQUIRE(values.size() == op.dimension());
    for (std::size_t i = 0; i < values.size(); ++i) CHECK(std::abs(values[i] - ref.eigenvalues()[i]) <= 1e-10);

    // The counting function of the union is the size-weighted sum of the blocks'.
    const double norm = static_cast<double>(op.dimension());
    auto whole = counting_function(values, norm);
    std::vector<DistributionFunction> parts;
    std::vector<double> weights;
    for (const auto& b : blocks) {
        parts.push_back(counting_function(eigenvalues(op.principal(b)), static_cast<double>(b.size())));
        weights.push_back(b.size() / norm);
    }
    auto mixed = DistributionFunction::mixture(parts, weights);
    for (double x = -4.05; x < 4.1; x += 0.1) CHECK(std::abs(whole(x) - mixed(x)) <= 1e-12);
}

TEST_CASE("counting function examples") {
    auto n = counting_function(std::vector<double>{-1.0, 0.0, 2.0}, 3.0);
    CHECK(n(0.0) == doctest::Approx(1.0 / 3));
    CHECK(n.right_limit(0.0) == doctest::Approx(2.0 / 3));
    CHECK(n(3.0) == 1.0);
    CHECK(n(-1.0) == 0.0);

    auto empty = counting_function(std::vector<double>{}, 4.0);
    CHECK(empty(10.0) == 0.0);
    CHECK(empty.jump_count() == 0);

    auto triple = counting_function(std::vector<double>{0.0, 0.0, 0.0}, 3.0);
    CHECK(triple.jump_count() == 1);
    CHECK(triple.weight(0) == 1.0);

    auto split = counting_function(std::vector<double>{-2.0, 1.0, 1.0 + 1e-12, 2.0}, 4.0);
    CHECK(split.jump_count() == 3);
    CHECK(split.right_limit(1.0) == 0.75);

    CHECK_THROWS_AS(counting_function(std::vector<double>{1.0}, 0.0), DomainError);
}

TEST_CASE("evaluation is left-continuous at every breakpoint") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> eigs(200);
    for (double& e : eigs) e = u(gen);
    auto n = counting_function(eigs, 250.0);
    auto loc = n.locations();
    for (std::size_t k = 0; k < loc.size(); ++k) {
        double left = std::nextafter(loc[k], -INFINITY);
        CHECK(n(loc[k]) == n(left));
        CHECK(n.right_limit(loc[k]) == n.cumulative()[k]);
        if (k > 0) CHECK(n.cumulative()[k] >= n.cumulative()[k - 1]);
    }
}

TEST_CASE("Laplace transform") {
    auto one = DistributionFunction::from_jumps({{1.0, 2.0}});
    CHECK(laplace_transform(one, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(laplace_transform(DistributionFunction{}, 3.0) == 0.0);
    CHECK_THROWS_AS(laplace_transform(one, 0.0), DomainError);

    auto positive = DistributionFunction::from_jumps({{0.5, 0.2}, {1.5, 0.3}, {2.0, 0.1}});
    double previous = INFINITY;
    for (double t = 0.1; t < 5; t += 0.2) {
        double v = laplace_transform(positive, t);
        CHECK(v < previous);
        previous = v;
    }
}

TEST_CASE("Laplace transform reproduces the heat trace") {
    auto op = adjacency_operator(sample_percolation(LatticeBox::cube(2, 12), 0.7, 9));
    const double c = static_cast<double>(op.dimension());
    auto n = counting_function(eigenvalues(op), c);
    for (double t : {0.3, 1.0, 2.5}) {
        double heat = heat_semigroup(op, t).trace();
        CHECK(std::abs(laplace_transform(n, t) * c - heat) <= 1e-9 * heat);
    }
}

TEST_CASE("Laplace agreement") {
    auto a = lebesgue_grid(50, 0.02);
    std::vector<double> ts{0.5, 1.0, 2.0};
    CHECK(laplace_agreement(a, a, ts) == 0.0);

    const double delta = 0.3;
    auto shifted = a.shifted(delta);
    for (double t : ts) {
        double gap = laplace_agreement(a, shifted, std::vector<double>{t});
        CHECK(gap >= laplace_transform(a, t) * (1 - std::exp(-t * delta)) - 1e-14);
    }
    auto doubled = a.scaled(2.0);
    for (double t : ts) {
        CHECK(laplace_agreement(a, doubled, std::vector<double>{t}) == doctest::Approx(laplace_transform(a, t)).epsilon(1e-14));
    }
}

TEST_CASE("cdf distance") {
    auto a = lebesgue_grid(40, 0.025);
    auto grid = linspace(-0.5, 1.5, 81);
    CHECK(cdf_distance(a, a, grid).sup_gap == 0.0);

    auto offset = a.with_base(0.125);
    CHECK(cdf_distance(a, offset, grid).sup_gap == doctest::Approx(0.125));

    auto s1 = DistributionFunction::from_jumps({{0.0, 0.4}});
    auto s2 = DistributionFunction::from_jumps({{0.0, 0.7}});
    std::vector<double> below{-1.0, -0.5}, above{0.5, 1.0};
    CHECK(cdf_distance(s1, s2, below).sup_gap == 0.0);
    CHECK(cdf_distance(s1, s2, above).sup_gap == doctest::Approx(0.3));

    CdfDistanceOptions opts;
    opts.jump_tolerance = 0.1;
    auto res = cdf_distance(s1, s2, std::vector<double>{-0.05, 0.05, 0.5}, opts);
    CHECK(res.admitted == 1);
    CHECK(res.excluded.size() == 2);
    CHECK_THROWS_AS(cdf_distance(s1, s2, std::vector<double>{0.0}, opts), DegeneracyError);
    CHECK_THROWS_AS(cdf_distance(s1, s2, std::vector<double>{}), DegeneracyError);
}

TEST_CASE("point part of a single atom") {
    auto pp = point_part(DistributionFunction::from_jumps({{0.0, 1.0}}), 4, 0.01, 0.01);
    REQUIRE(pp.atoms.size() == 1);
    CHECK(pp.atoms.atoms()[0].location == 0.0);
    CHECK(pp.atoms.atoms()[0].weight == 1.0);
}

TEST_CASE("point part of discretized Lebesgue measure is empty") {
    auto pp = point_part(lebesgue_grid(1000, 1e-3), 16, 0.005, 0.01);
    CHECK(pp.atoms.empty());
    CHECK(pp.largest_interval_mass <= 0.006 + 1e-15);
}

TEST_CASE("point part of a mixed measure matches exhaustive search") {
    auto mixed = DistributionFunction::mixture(
        std::vector<DistributionFunction>{DistributionFunction::from_jumps({{0.0, 1.0}}), lebesgue_grid(1000, 1e-3)},
        std::vector<double>{0.5, 1.0});
    auto pp = point_part(mixed, 16, 0.005, 0.01);
    REQUIRE(pp.atoms.size() == 1);
    const auto atom = pp.atoms.atoms()[0];
    CHECK(atom.weight >= 0.5);
    CHECK(atom.weight <= 0.506);
    CHECK(std::abs(atom.location) < 0.005);

    double best = 0.0;
    for (const Interval& iv : all_intervals(mixed, 0.005)) best = std::max(best, iv.mass);
    CHECK(atom.weight == doctest::Approx(best).epsilon(1e-12));
    CHECK(pp.certified);
}

TEST_CASE("optimal k-interval mass agrees with brute force on small inputs") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> loc(0.0, 1.0), weight(0.01, 0.2);
    for (int trial = 0; trial < 20; ++trial) {
        Jumps j;
        const int m = 8 + trial % 10;
        for (int i = 0; i < m; ++i) j.push_back({loc(gen), weight(gen)});
        auto n = DistributionFunction::from_jumps(j);
        for (int k : {1, 2, 3}) {
            const double length = 0.05 + 0.02 * trial;
            auto pp = point_part(n, k, length, 1e-6);
            const double brute = brute_k_interval_mass(all_intervals(n, length), k);
            CHECK(pp.optimal_mass == doctest::Approx(brute).epsilon(1e-12));
            CHECK(pp.greedy_mass <= brute + 1e-12);
            CHECK(pp.greedy_mass >= brute - pp.largest_interval_mass - 1e-12);
            CHECK(pp.certified);
            CHECK(pp.atoms.total() <= n.jump_mass() + 1e-12);
        }
    }
}

TEST_CASE("point part is idempotent on atomic input") {
    AtomicMeasure mu({{-1.0, 0.3}, {0.0, 0.05}, {2.0, 0.2}});
    auto first = point_part(mu.distribution(), 8, 0.01, 0.01);
    auto second = point_part(first.atoms.distribution(), 8, 0.01, 0.01);
    REQUIRE(first.atoms.size() == 3);
    REQUIRE(second.atoms.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(second.atoms.atoms()[i].location == mu.atoms()[i].location);
        CHECK(std::abs(second.atoms.atoms()[i].weight - mu.atoms()[i].weight) <= 0.01);
    }
}

TEST_CASE("serialization columns") {
    auto n = counting_function(std::vector<double>{0.0, 1.0}, 2.0);
    auto csv = n.to_csv();
    CHECK(csv.rfind("lambda,N_left,N_right\n", 0) == 0);
    AtomicMeasure mu({{0.5, 0.25}});
    CHECK(mu.to_csv().rfind("location,weight\n", 0) == 0);
}

TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(DistributionFunction::from_jumps({{0.0, -1.0}}), DomainError);
    CHECK_THROWS_AS(DistributionFunction::from_cumulative({0.0, 1.0}, {0.5, 0.4}), DomainError);
    CHECK_THROWS_AS(AtomicMeasure({{0.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(point_part(DistributionFunction{}, 0, 0.1, 0.1), DomainError);
}
