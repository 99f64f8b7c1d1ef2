#include "ids/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "ids/delone.hpp"
#include "ids/errors.hpp"
#include "ids/rng.hpp"

namespace ids {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::percolation_adjacency: return "percolation-adjacency";
        case ModelKind::percolation_laplacian: return "percolation-laplacian";
        case ModelKind::anderson: return "anderson";
        case ModelKind::delone_voronoi: return "delone-voronoi";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    for (auto k : {ModelKind::percolation_adjacency, ModelKind::percolation_laplacian, ModelKind::anderson,
                   ModelKind::delone_voronoi}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown model '" + name + "'");
}

void OperatorEnsembleSpec::validate() const {
    if (dimension < 1 || dimension > kMaxDimension) throw DomainError("model dimension must be 1, 2 or 3");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("percolation probability must lie in [0,1]");
    if (!(potential_low <= potential_high)) throw DomainError("Anderson potential bounds are inverted");
    if (!std::isfinite(hopping)) throw DomainError("hopping must be finite");
    if (model == ModelKind::delone_voronoi) {
        if (dimension != 2) throw DomainError("delone-voronoi ensembles are two-dimensional");
        if (!(amplitude >= 0.0 && amplitude < 0.5)) throw DomainError("perturbation amplitude must lie in [0, 1/2)");
    }
    if (!fundamental_domain.empty()) {
        if (static_cast<int>(fundamental_domain.size()) != dimension) {
            throw DomainError("fundamental domain needs one side per dimension");
        }
        for (int s : fundamental_domain) {
            if (s < 1) throw DomainError("fundamental domain sides must be positive");
        }
    }
}

std::size_t OperatorEnsembleSpec::domain_size() const {
    std::size_t n = 1;
    for (int s : fundamental_domain) n *= static_cast<std::size_t>(s);
    return n;
}

std::pair<double, double> OperatorEnsembleSpec::spectral_bounds() const {
    const double d2 = 2.0 * dimension;
    switch (model) {
        case ModelKind::percolation_adjacency: return {-d2, d2};
        case ModelKind::percolation_laplacian: return {0.0, 2.0 * d2};
        case ModelKind::anderson: {
            double h = d2 * std::abs(hopping);
            return {potential_low - h, potential_high + h};
        }
        case ModelKind::delone_voronoi: return {-10.0, 10.0};
    }
    return {-d2, d2};
}

std::uint64_t OperatorEnsembleSpec::seed(std::size_t realization) const {
    return rng::realization_seed(base_seed, realization);
}

namespace {

void check_tiling(const OperatorEnsembleSpec& spec, const LatticeBox& box) {
    if (box.dimension() != spec.dimension) throw ConfigError("box dimension does not match the model");
    for (std::size_t k = 0; k < spec.fundamental_domain.size(); ++k) {
        if (box.side(static_cast<int>(k)) % spec.fundamental_domain[k] != 0) {
            throw ConfigError("box sides must be multiples of the fundamental domain");
        }
    }
}

SymmetricOperator build_delone(const OperatorEnsembleSpec& spec, const LatticeBox& box, std::uint64_t seed) {
    // Two extra rings so that every cell of a box point is bounded and inside
    // the generation window.
    const LatticeBox outer = box.padded(2);
    DeloneSet set = perturbed_lattice(outer, spec.amplitude, seed);
    VoronoiAdjacency adj = voronoi_adjacency(set);
    std::vector<std::size_t> position(outer.site_count(), static_cast<std::size_t>(-1));
    std::vector<Coord> labels;
    for (std::size_t i = 0; i < outer.site_count(); ++i) {
        Coord c = outer.coordinate(i);
        if (box.contains(c) && !adj.boundary[i]) {
            position[i] = labels.size();
            labels.push_back(c);
        }
    }
    std::vector<SymmetricOperator::Entry> entries;
    for (auto [i, j] : adj.edges) {
        if (position[i] != static_cast<std::size_t>(-1) && position[j] != static_cast<std::size_t>(-1)) {
            entries.push_back({position[i], position[j], 1.0});
        }
    }
    return SymmetricOperator(std::move(labels), LabelKind::lattice, std::move(entries), 1);
}

}  // namespace

SymmetricOperator OperatorEnsembleSpec::build(const LatticeBox& box, std::size_t realization) const {
    validate();
    check_tiling(*this, box);
    const std::uint64_t s = seed(realization);
    switch (model) {
        case ModelKind::percolation_adjacency: return adjacency_operator(sample_percolation(box, p, s));
        case ModelKind::percolation_laplacian: return laplacian_operator(sample_percolation(box, p, s));
        case ModelKind::anderson: return anderson_operator(box, potential_low, potential_high, hopping, s);
        case ModelKind::delone_voronoi: return build_delone(*this, box, s);
    }
    throw ConfigError("unknown model");
}

bool OperatorEnsembleSpec::same_model(const OperatorEnsembleSpec& other) const {
    OperatorEnsembleSpec a = *this, b = other;
    a.base_seed = b.base_seed = 0;
    return a == b;
}

std::vector<double> default_lambda_grid(const OperatorEnsembleSpec& spec, std::size_t points) {
    auto [lo, hi] = spec.spectral_bounds();
    return linspace(lo, hi, points);
}

}  // namespace ids
