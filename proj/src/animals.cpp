#include "ids/animals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ids/errors.hpp"
#include "ids/operator.hpp"
#include "ids/spectra.hpp"

namespace ids {

namespace {

using Shape = std::vector<Coord>;

Shape normalized(Shape s, int d) {
    Coord lo{0, 0, 0};
    for (int k = 0; k < d; ++k) {
        lo[k] = s.front()[k];
        for (const Coord& c : s) lo[k] = std::min(lo[k], c[k]);
    }
    for (Coord& c : s) {
        for (int k = 0; k < d; ++k) c[k] -= lo[k];
    }
    std::sort(s.begin(), s.end());
    return s;
}

std::vector<Coord> unit_steps(int d) {
    std::vector<Coord> out;
    for (int k = 0; k < d; ++k) {
        Coord e{0, 0, 0};
        e[k] = 1;
        out.push_back(e);
        e[k] = -1;
        out.push_back(e);
    }
    return out;
}

Coord add(Coord a, const Coord& b) {
    for (int k = 0; k < 3; ++k) a[k] += b[k];
    return a;
}

// Axis permutations combined with sign flips.
std::vector<Shape> orientations(const Shape& s, int d) {
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Shape> out;
    do {
        for (int signs = 0; signs < (1 << d); ++signs) {
            Shape t;
            for (const Coord& c : s) {
                Coord u{0, 0, 0};
                for (int k = 0; k < d; ++k) u[k] = (signs >> k & 1) ? -c[perm[k]] : c[perm[k]];
                t.push_back(u);
            }
            out.push_back(normalized(std::move(t), d));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

}  // namespace

double ClusterShape::density(double p) const {
    return placements * std::pow(p, sites) * std::pow(1.0 - p, perimeter);
}

double ClusterAtomTable::weight_at(double lambda, double window) const {
    double w = 0.0;
    for (const auto& a : atoms.atoms()) {
        if (std::abs(a.location - lambda) <= window) w += a.weight;
    }
    return w;
}

double ClusterAtomTable::site_budget() const {
    double total = 0.0;
    for (const ClusterShape& s : shapes) total += s.sites * s.density(p);
    return total;
}

std::size_t ClusterAtomTable::fixed_count(int sites) const {
    std::size_t n = 0;
    for (const ClusterShape& s : shapes) {
        if (s.sites == sites) n += static_cast<std::size_t>(s.placements);
    }
    return n;
}

std::size_t ClusterAtomTable::free_count(int sites) const {
    return static_cast<std::size_t>(
        std::count_if(shapes.begin(), shapes.end(), [&](const ClusterShape& s) { return s.sites == sites; }));
}

ClusterAtomTable cluster_atom_oracle(int s_max, double p, int dimension) {
    if (s_max < 1) throw DomainError("s_max must be at least 1");
    if (s_max > kMaxAnimalSize) {
        throw SizeError("s_max " + std::to_string(s_max) + " exceeds the enumeration cap " +
                        std::to_string(kMaxAnimalSize));
    }
    if (dimension < 1 || dimension > kMaxDimension) throw DomainError("dimension must be 1, 2 or 3");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("percolation probability must lie in [0,1]");

    const auto steps = unit_steps(dimension);
    ClusterAtomTable table;
    table.s_max = s_max;
    table.dimension = dimension;
    table.p = p;

    // Fixed animals grown one cell at a time, deduplicated up to translation.
    std::set<Shape> level{Shape{Coord{0, 0, 0}}};
    for (int size = 1; size <= s_max; ++size) {
        std::set<Shape> seen;
        for (const Shape& fixed : level) {
            if (seen.contains(fixed)) continue;
            auto orient = orientations(fixed, dimension);
            std::set<Shape> distinct(orient.begin(), orient.end());
            for (const Shape& o : distinct) seen.insert(o);

            ClusterShape shape;
            shape.cells = *distinct.begin();
            shape.sites = size;
            shape.placements = static_cast<int>(distinct.size());
            std::set<Coord> cells(shape.cells.begin(), shape.cells.end()), boundary;
            std::vector<SymmetricOperator::Entry> entries;
            for (std::size_t i = 0; i < shape.cells.size(); ++i) {
                for (const Coord& e : steps) {
                    Coord n = add(shape.cells[i], e);
                    if (!cells.contains(n)) {
                        boundary.insert(n);
                        continue;
                    }
                    auto j = static_cast<std::size_t>(
                        std::lower_bound(shape.cells.begin(), shape.cells.end(), n) - shape.cells.begin());
                    if (i < j) entries.push_back({i, j, 1.0});
                }
            }
            shape.perimeter = static_cast<int>(boundary.size());
            shape.spectrum = eigenvalues(SymmetricOperator(shape.cells, LabelKind::lattice, std::move(entries), 1));
            table.shapes.push_back(std::move(shape));
        }
        if (size == s_max) break;
        std::set<Shape> next;
        for (const Shape& fixed : level) {
            std::set<Coord> cells(fixed.begin(), fixed.end());
            for (const Coord& c : fixed) {
                for (const Coord& e : steps) {
                    Coord n = add(c, e);
                    if (cells.contains(n)) continue;
                    Shape grown = fixed;
                    grown.push_back(n);
                    next.insert(normalized(std::move(grown), dimension));
                }
            }
        }
        level = std::move(next);
    }

    // Aggregate eigenvalues across shapes; numerically equal values pool.
    std::vector<AtomicMeasure::Atom> raw;
    for (const ClusterShape& s : table.shapes) {
        const double w = s.density(p);
        if (w <= 0.0) continue;
        for (double x : s.spectrum) raw.push_back({x, w});
    }
    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.location < b.location; });
    std::vector<AtomicMeasure::Atom> pooled;
    for (std::size_t i = 0; i < raw.size();) {
        std::size_t j = i;
        double mass = 0.0, moment = 0.0;
        while (j < raw.size() && raw[j].location - raw[i].location <= 1e-9) {
            mass += raw[j].weight;
            moment += raw[j].weight * raw[j].location;
            ++j;
        }
        double at = moment / mass;
        if (std::abs(at) < 1e-12) at = 0.0;
        pooled.push_back({at, mass});
        i = j;
    }
    table.atoms = AtomicMeasure(std::move(pooled));
    return table;
}

JumpReport ids_jump_compare(const IdsRun& ids, const ClusterAtomTable& oracle, double tolerance,
                            const JumpCompareOptions& options) {
    if (ids.spec.model != ModelKind::percolation_adjacency) {
        throw ConfigError("ids_jump_compare needs a percolation-adjacency run, got " + to_string(ids.spec.model));
    }
    if (ids.spec.dimension != oracle.dimension || ids.spec.p != oracle.p) {
        throw ConfigError("cluster oracle was built for a different dimension or p");
    }
    if (ids.normalization != Normalization::volume) throw ConfigError("ids_jump_compare needs volume normalization");

    const IdsScale& top = ids.largest();
    const DistributionFunction mean = top.mean_distribution();
    const PointPart pp = point_part(mean, options.k_max, 2.0 * options.window, options.mass_floor);

    JumpReport rep;
    rep.tolerance = tolerance;
    rep.pass = true;
    std::vector<double> per_seed(top.realizations.size());
    for (const auto& atom : oracle.atoms.atoms()) {
        JumpMatch m;
        m.location = atom.location;
        m.oracle_weight = atom.weight;
        for (const auto& a : pp.atoms.atoms()) {
            if (std::abs(a.location - atom.location) <= options.window) m.empirical += a.weight;
        }
        for (std::size_t r = 0; r < per_seed.size(); ++r) {
            const auto& f = top.realizations[r];
            per_seed[r] = f.right_limit(atom.location + options.window) - f(atom.location - options.window);
        }
        if (per_seed.size() > 1) {
            double mu = std::accumulate(per_seed.begin(), per_seed.end(), 0.0) / per_seed.size();
            double ss = 0.0;
            for (double v : per_seed) ss += (v - mu) * (v - mu);
            m.std_error = std::sqrt(ss / (per_seed.size() - 1)) / std::sqrt(static_cast<double>(per_seed.size()));
        }
        m.resolved = m.oracle_weight >= options.mass_floor;
        m.pass = m.empirical >= m.oracle_weight - 3.0 * m.std_error;
        if (m.resolved) rep.pass = rep.pass && m.pass;
        rep.matches.push_back(m);
    }
    for (const auto& a : pp.atoms.atoms()) {
        if (a.weight < tolerance) continue;
        if (oracle.weight_at(a.location, options.window) > 0.0) continue;
        rep.unmatched.push_back(a);
    }
    return rep;
}

}  // namespace ids
