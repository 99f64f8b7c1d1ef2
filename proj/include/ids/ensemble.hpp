#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ids/lattice.hpp"
#include "ids/operator.hpp"

namespace ids {

enum class ModelKind { percolation_adjacency, percolation_laplacian, anderson, delone_voronoi };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// A random operator family H_omega together with the seeding rule that picks
// omega for each realization.
struct OperatorEnsembleSpec {
    ModelKind model = ModelKind::percolation_adjacency;
    int dimension = 2;
    double p = 1.0;               // percolation models
    double potential_low = 0.0;   // anderson
    double potential_high = 0.0;  // anderson
    double hopping = 1.0;         // anderson
    double amplitude = 0.2;       // delone-voronoi
    // Sides of the fundamental domain D; empty means a single site.
    std::vector<int> fundamental_domain;
    std::uint64_t base_seed = 0;

    void validate() const;
    // |D|, the number of sites in the fundamental domain.
    std::size_t domain_size() const;
    // Interval containing the spectrum of every realization.
    std::pair<double, double> spectral_bounds() const;
    std::uint64_t seed(std::size_t realization) const;

    // H_omega restricted to `box` (Dirichlet), omega = realization `index`.
    // Labels are lattice coordinates for every model; for delone-voronoi they
    // are the nominal lattice sites of the perturbed points.
    SymmetricOperator build(const LatticeBox& box, std::size_t realization) const;

    // Same model and parameters, seeds ignored.
    bool same_model(const OperatorEnsembleSpec& other) const;
    friend bool operator==(const OperatorEnsembleSpec&, const OperatorEnsembleSpec&) = default;
};

// 512 points on the spectral bounds.
std::vector<double> default_lambda_grid(const OperatorEnsembleSpec& spec, std::size_t points = 512);

}  // namespace ids
