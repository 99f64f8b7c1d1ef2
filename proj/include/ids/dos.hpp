#pragma once

// Exhaustion of random operators by finite boxes, estimation of the abstract
// density of states through localized traces, and the diagnostics comparing
// the two.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ids/distribution.hpp"
#include "ids/ensemble.hpp"
#include "ids/lattice.hpp"

namespace ids {

enum class Normalization {
    volume,    // |I_n| * |D| = number of lattice sites of the box
    occupied,  // number of sites carrying the operator (|B_n ∩ omega|)
};

std::string to_string(Normalization n);

struct IdsScale {
    LatticeBox box;
    std::vector<DistributionFunction> realizations;  // N_omega^n, one per seed
    std::vector<double> normalizations;              // denominator used per seed
    // On the run's lambda grid; eigenvalues within 1e-9 of the spectral width
    // above a grid point count as lying on it.
    std::vector<double> mean;
    std::vector<double> std;  // sample std (n-1), 0 for one seed

    // Seed average of the counting functions.
    DistributionFunction mean_distribution() const;
};

struct IdsRun {
    OperatorEnsembleSpec spec;
    FolnerSequence folner;
    std::size_t realizations = 0;
    Normalization normalization = Normalization::volume;
    std::vector<double> lambda_grid;
    std::vector<IdsScale> scales;

    const IdsScale& largest() const { return scales.back(); }
};

IdsRun empirical_ids(const OperatorEnsembleSpec& spec, const FolnerSequence& folner, std::size_t realizations,
                     Normalization normalization = Normalization::volume, std::vector<double> lambda_grid = {});

struct DosEstimate {
    OperatorEnsembleSpec spec;
    LatticeBox box;  // sites carrying chi_D; the operator lives on box padded by `padding`
    int padding = 0;
    std::size_t realizations = 0;
    std::vector<double> lambda_grid;
    // rho_H(]-inf, lambda[) per fundamental domain, and its standard error
    // (grid points resolved as for IdsScale::mean).
    std::vector<double> values;
    std::vector<double> std_errors;
    // Localized spectral measures per seed, normalized per copy of D.
    std::vector<DistributionFunction> per_realization;
    bool padding_check_performed = false;
    bool padding_too_small = false;
    double padding_shift = 0.0;  // max |doubled - base| over the grid

    DistributionFunction mean_distribution() const;
};

enum class PaddingCheck { automatic, off };

DosEstimate abstract_dos(const OperatorEnsembleSpec& spec, std::vector<double> lambda_grid, int padding,
                         const LatticeBox& box, std::size_t realizations,
                         PaddingCheck check = PaddingCheck::automatic);

struct ContinuityOptions {
    // Jump clusters below this mass are treated as part of the continuous part.
    double jump_mass_floor = 1e-3;
    // Grid points within this many pitches of a detected jump are excluded.
    double exclusion_pitches = 2.0;
};

struct GapReport {
    std::vector<double> lambda;
    std::vector<double> gap;
    std::vector<double> std_error;
    std::vector<bool> admitted;
    double sup_gap = 0.0;
    double argmax = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// |N_H(lambda) - rho_H(]-inf,lambda[)/|D|| with N_H the largest-scale mean.
GapReport trace_formula_check(const IdsRun& ids, const DosEstimate& dos, std::vector<double> lambda_grid,
                              double tolerance, const ContinuityOptions& options = {});

struct LaplaceReport {
    std::vector<double> t;
    std::vector<double> ids_side;  // Laplace transform of the mean IDS of H + shift
    std::vector<double> dos_side;  // tau(exp(-t (H + shift))) / |D|
    std::vector<double> std_error;
    double shift = 0.0;
    double max_gap = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// shift defaults to -(lower spectral bound), which makes H + shift >= 0.
LaplaceReport laplace_route_check(const IdsRun& ids, const DosEstimate& dos, std::vector<double> t_grid,
                                  double tolerance, std::optional<double> shift = std::nullopt);

struct BoundaryReport {
    std::vector<std::size_t> volumes;
    std::vector<double> deviation;  // max over seeds
    std::vector<double> ratio;      // deviation[n] / deviation[n+1]
    bool decreasing = false;
};

// max_seed |tr(chi_{A_n} e^{-tH^pad}) - tr(e^{-tH^n})| / |A_n|, H^pad on A_n padded by `padding`.
BoundaryReport boundary_independence(const OperatorEnsembleSpec& spec, const FolnerSequence& folner, double t,
                                     std::size_t realizations, int padding);

struct SelfAveragingReport {
    std::vector<double> lambda;
    std::vector<std::vector<double>> std;    // [scale][lambda]
    std::vector<std::vector<double>> ratio;  // [scale pair][lambda], NaN where undefined
    std::vector<std::size_t> volumes;
};

SelfAveragingReport self_averaging_report(const IdsRun& ids, std::vector<double> lambda_grid = {});

enum class SpectralClass { empty, infinite, bounded_nonzero };
std::string to_string(SpectralClass c);

struct DichotomyReport {
    double a = 0.0;
    double b = 0.0;
    std::vector<std::size_t> volumes;
    std::vector<std::vector<long>> counts;  // [scale][seed]
    std::vector<double> mean_counts;
    double slope = 0.0;  // fitted eigenvalues per site
    double slope_std_error = 0.0;
    SpectralClass classification = SpectralClass::empty;
};

DichotomyReport dichotomy_check(const IdsRun& ids, double a, double b);

struct ConstancyReport {
    std::vector<std::pair<double, double>> ranges;  // per seed, largest scale
    double max_hausdorff = 0.0;
    double union_min = 0.0;
    double union_max = 0.0;
    double support_min = 0.0;  // from the mean IDS on the grid
    double support_max = 0.0;
    double grid_pitch = 0.0;
    double hull_gap = 0.0;  // max(|union_min - support_min|, |union_max - support_max|)
    bool pass = false;      // hull_gap <= one grid pitch
};

ConstancyReport spectrum_constancy_report(const IdsRun& ids);

// Hausdorff distance between two finite sorted point sets.
double hausdorff_distance(std::span<const double> a, std::span<const double> b);

}  // namespace ids
