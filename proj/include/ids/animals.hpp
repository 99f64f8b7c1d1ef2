#pragma once

// Finite percolation clusters (lattice animals) and the eigenvalue atoms they
// force into the integrated density of states.

#include <cstddef>
#include <vector>

#include "ids/distribution.hpp"
#include "ids/dos.hpp"
#include "ids/lattice.hpp"

namespace ids {

inline constexpr int kMaxAnimalSize = 8;

struct ClusterShape {
    std::vector<Coord> cells;  // canonical: translated to the origin, lexicographic minimum over symmetries
    int sites = 0;
    int placements = 0;  // distinct fixed orientations
    int perimeter = 0;   // empty neighbour sites
    std::vector<double> spectrum;

    // Expected number of clusters of this shape per lattice site.
    double density(double p) const;
};

struct ClusterAtomTable {
    int s_max = 0;
    int dimension = 2;
    double p = 0.0;
    std::vector<ClusterShape> shapes;
    AtomicMeasure atoms;  // eigenvalue -> weight per site

    // Total atom weight within `window` of lambda.
    double weight_at(double lambda, double window = 1e-6) const;
    // Sum over shapes of sites * density; at most 1.
    double site_budget() const;
    std::size_t fixed_count(int sites) const;
    std::size_t free_count(int sites) const;
};

ClusterAtomTable cluster_atom_oracle(int s_max, double p, int dimension = 2);

struct JumpMatch {
    double location = 0.0;
    double oracle_weight = 0.0;
    double empirical = 0.0;  // point-part atom mass matched to this location, 0 if none
    double std_error = 0.0;  // of the per-seed jump at this location
    bool resolved = false;   // oracle_weight >= the point-part mass floor
    bool pass = false;       // empirical >= oracle_weight - 3 std_error
};

struct JumpCompareOptions {
    double window = 1e-6;  // matching radius around an oracle location
    int k_max = 256;
    double mass_floor = 1e-4;
};

struct JumpReport {
    std::vector<JumpMatch> matches;
    // point-part atoms above `tolerance` that no oracle atom explains
    std::vector<AtomicMeasure::Atom> unmatched;
    double tolerance = 0.0;
    bool pass = false;  // every resolved match passes
};

JumpReport ids_jump_compare(const IdsRun& ids, const ClusterAtomTable& oracle, double tolerance,
                            const JumpCompareOptions& options = {});

}  // namespace ids
