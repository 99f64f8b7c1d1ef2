#pragma once

// Finite boxes of Z^d, Følner exhaustions and site percolation.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ids {

inline constexpr int kMaxDimension = 3;

using Coord = std::array<std::int32_t, kMaxDimension>;

// Axis-aligned box {offset_k <= x_k < offset_k + side_k} in Z^d. Unused axes
// (k >= d) have side 1 and offset 0. Site index runs with axis 0 fastest.
class LatticeBox {
public:
    LatticeBox() = default;
    LatticeBox(int dimension, std::span<const int> sides, std::span<const int> offset);

    // Box of the given sides centred at the origin: offset_k = -(side_k / 2).
    static LatticeBox centered(int dimension, std::span<const int> sides);
    static LatticeBox cube(int dimension, int side) ;

    int dimension() const noexcept { return dimension_; }
    int side(int axis) const noexcept { return sides_[axis]; }
    int offset(int axis) const noexcept { return offset_[axis]; }
    std::vector<int> sides() const { return {sides_.begin(), sides_.begin() + dimension_}; }
    std::vector<int> offsets() const { return {offset_.begin(), offset_.begin() + dimension_}; }
    std::size_t site_count() const noexcept { return count_; }

    Coord coordinate(std::size_t index) const;
    std::size_t index(const Coord& c) const;
    bool contains(const Coord& c) const noexcept;
    // Box contained in this one (every site of `inner` is a site of *this).
    bool contains(const LatticeBox& inner) const noexcept;

    // Sites with a lattice neighbour outside the box.
    std::size_t boundary_site_count() const noexcept;

    // Box grown by `radius` sites on every side of every active axis.
    LatticeBox padded(int radius) const;
    LatticeBox shifted(const Coord& shift) const;

    friend bool operator==(const LatticeBox&, const LatticeBox&) = default;

private:
    int dimension_ = 1;
    std::array<int, kMaxDimension> sides_{1, 1, 1};
    std::array<int, kMaxDimension> offset_{0, 0, 0};
    std::size_t count_ = 1;
};

// Nested centred boxes with strictly decreasing boundary-to-volume ratio.
struct FolnerSequence {
    int dimension = 1;
    std::vector<LatticeBox> boxes;
};

// Centred boxes whose axis-k side at scale n is schedule[n] * aspect[k]
// (aspect defaults to all ones, i.e. cubes).
FolnerSequence folner_boxes(int dimension, std::span<const int> schedule,
                            std::span<const int> aspect = {});

enum class BoundaryMode { open, torus };

// One disorder realization restricted to a box. Occupancy of a site is a
// function of (p, seed, global coordinate) only, so two boxes sampled with the
// same seed agree on their overlap.
struct PercolationConfig {
    LatticeBox box;
    double p = 1.0;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> occupied;  // one entry per box site, 0 or 1

    std::size_t occupied_count() const noexcept;
    bool is_occupied(const Coord& c) const { return box.contains(c) && occupied[box.index(c)] != 0; }
};

bool site_occupied(double p, std::uint64_t seed, const Coord& c) noexcept;

PercolationConfig sample_percolation(const LatticeBox& box, double p, std::uint64_t seed);

// Torus mode: the result lives on the same box and out(x + shift mod sides) = in(x).
// Window mode: the result lives on window + shift, which must lie inside the
// original box, and out(x + shift) = in(x) for x in window.
PercolationConfig translate_config(const PercolationConfig& config, const Coord& shift,
                                   BoundaryMode mode = BoundaryMode::torus,
                                   std::optional<LatticeBox> window = std::nullopt);

// Connected components of the occupied sites under nearest-neighbour
// adjacency. Each component lists box site indices in increasing order;
// components are ordered by their smallest index.
std::vector<std::vector<std::size_t>> clusters(const PercolationConfig& config,
                                               BoundaryMode mode = BoundaryMode::open);

// Nearest neighbours of box site `index` inside the box (torus wraps).
// Neighbours are distinct; on a torus of side 2 the two directions coincide.
std::vector<std::size_t> lattice_neighbours(const LatticeBox& box, std::size_t index,
                                            BoundaryMode mode);

std::string config_to_json(const PercolationConfig& config);
PercolationConfig config_from_json(const std::string& text);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace ids
