#include "ids/dos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ids/errors.hpp"
#include "ids/operator.hpp"
#include "ids/parallel.hpp"
#include "ids/spectra.hpp"

namespace ids {

namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation
};

MeanStd mean_std(std::span<const double> x) {
    MeanStd out;
    if (x.empty()) return out;
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
        out.mean = x.front();
        return out;
    }
    for (double v : x) out.mean += v;
    out.mean /= static_cast<double>(x.size());
    if (x.size() > 1) {
        double ss = 0.0;
        for (double v : x) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(x.size() - 1));
    }
    return out;
}

DistributionFunction uniform_mixture(const std::vector<DistributionFunction>& parts) {
    std::vector<double> w(parts.size(), parts.empty() ? 0.0 : 1.0 / static_cast<double>(parts.size()));
    return DistributionFunction::mixture(parts, w);
}

std::vector<Coord> box_sites(const LatticeBox& box) {
    std::vector<Coord> out(box.site_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = box.coordinate(i);
    return out;
}

double grid_pitch(std::span<const double> grid) { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }

// Grid columns hold N(lambda - eta): an eigenvalue within eta of a grid point
// counts as lying on it, and left-continuity then leaves it out.
double grid_resolution(const OperatorEnsembleSpec& spec) {
    const auto [lo, hi] = spec.spectral_bounds();
    return 1e-9 * std::max(hi - lo, 1.0);
}

}  // namespace

std::string to_string(Normalization n) { return n == Normalization::volume ? "volume" : "occupied"; }

std::string to_string(SpectralClass c) {
    switch (c) {
        case SpectralClass::empty: return "empty";
        case SpectralClass::infinite: return "infinite";
        case SpectralClass::bounded_nonzero: return "bounded-nonzero";
    }
    return "unknown";
}

DistributionFunction IdsScale::mean_distribution() const { return uniform_mixture(realizations); }

DistributionFunction DosEstimate::mean_distribution() const { return uniform_mixture(per_realization); }

IdsRun empirical_ids(const OperatorEnsembleSpec& spec, const FolnerSequence& folner, std::size_t realizations,
                     Normalization normalization, std::vector<double> lambda_grid) {
    spec.validate();
    if (realizations < 1) throw DomainError("empirical_ids needs at least one realization");
    if (folner.boxes.empty()) throw InvalidSchedule("empty Følner sequence");
    for (std::size_t n = 0; n < folner.boxes.size(); ++n) {
        if (folner.boxes[n].site_count() > kDenseThreshold) {
            throw SizeError("scale " + std::to_string(n) + " box has " + std::to_string(folner.boxes[n].site_count()) +
                            " sites, above the dense threshold " + std::to_string(kDenseThreshold));
        }
    }
    IdsRun run;
    run.spec = spec;
    run.folner = folner;
    run.realizations = realizations;
    run.normalization = normalization;
    run.lambda_grid = lambda_grid.empty() ? default_lambda_grid(spec) : std::move(lambda_grid);
    run.scales.resize(folner.boxes.size());
    for (std::size_t n = 0; n < folner.boxes.size(); ++n) {
        run.scales[n].box = folner.boxes[n];
        run.scales[n].realizations.resize(realizations);
        run.scales[n].normalizations.resize(realizations);
    }
    const std::size_t jobs = folner.boxes.size() * realizations;
    parallel_for(jobs, [&](std::size_t job) {
        // Largest boxes first so that the pool drains evenly.
        const std::size_t n = folner.boxes.size() - 1 - job / realizations;
        const std::size_t r = job % realizations;
        const LatticeBox& box = folner.boxes[n];
        SymmetricOperator op = spec.build(box, r);
        const double norm = normalization == Normalization::volume ? static_cast<double>(box.site_count())
                                                                   : static_cast<double>(op.dimension());
        run.scales[n].normalizations[r] = norm;
        if (op.dimension() == 0) return;
        auto eigs = eigenvalues(op);
        run.scales[n].realizations[r] = counting_function(eigs, norm);
    });
    const double eta = grid_resolution(spec);
    std::vector<double> column(realizations);
    for (IdsScale& scale : run.scales) {
        scale.mean.resize(run.lambda_grid.size());
        scale.std.resize(run.lambda_grid.size());
        for (std::size_t j = 0; j < run.lambda_grid.size(); ++j) {
            for (std::size_t r = 0; r < realizations; ++r) column[r] = scale.realizations[r](run.lambda_grid[j] - eta);
            auto ms = mean_std(column);
            scale.mean[j] = ms.mean;
            scale.std[j] = ms.std;
        }
    }
    return run;
}

namespace {

std::vector<DistributionFunction> localized_measures(const OperatorEnsembleSpec& spec, const LatticeBox& box,
                                                     int padding, std::size_t realizations) {
    const LatticeBox outer = box.padded(padding);
    if (outer.site_count() > kDenseThreshold) {
        throw SizeError("padded box has " + std::to_string(outer.site_count()) + " sites, above the dense threshold " +
                        std::to_string(kDenseThreshold));
    }
    const auto domain = box_sites(box);
    const double copies = static_cast<double>(box.site_count()) / static_cast<double>(spec.domain_size());
    std::vector<DistributionFunction> out(realizations);
    parallel_for(realizations, [&](std::size_t r) {
        SymmetricOperator op = spec.build(outer, r);
        out[r] = localized_spectral_distribution(op, domain).scaled(1.0 / copies);
    });
    return out;
}

}  // namespace

DosEstimate abstract_dos(const OperatorEnsembleSpec& spec, std::vector<double> lambda_grid, int padding,
                         const LatticeBox& box, std::size_t realizations, PaddingCheck check) {
    spec.validate();
    if (realizations < 1) throw DomainError("abstract_dos needs at least one realization");
    if (padding < 0) throw DomainError("padding must be nonnegative");
    if (box.dimension() != spec.dimension) throw ConfigError("box dimension does not match the model");
    DosEstimate est;
    est.spec = spec;
    est.box = box;
    est.padding = padding;
    est.realizations = realizations;
    est.lambda_grid = lambda_grid.empty() ? default_lambda_grid(spec) : std::move(lambda_grid);
    est.per_realization = localized_measures(spec, box, padding, realizations);

    const std::size_t m = est.lambda_grid.size();
    est.values.resize(m);
    est.std_errors.resize(m);
    std::vector<double> column(realizations);
    const double root = std::sqrt(static_cast<double>(realizations));
    const double eta = grid_resolution(spec);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t r = 0; r < realizations; ++r) column[r] = est.per_realization[r](est.lambda_grid[j] - eta);
        auto ms = mean_std(column);
        est.values[j] = ms.mean;
        est.std_errors[j] = ms.std / root;
    }

    if (check == PaddingCheck::automatic && padding > 0 &&
        box.padded(2 * padding).site_count() <= kDenseThreshold) {
        est.padding_check_performed = true;
        auto doubled = localized_measures(spec, box, 2 * padding, realizations);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t r = 0; r < realizations; ++r) {
                column[r] = doubled[r](est.lambda_grid[j] - eta) - est.per_realization[r](est.lambda_grid[j] - eta);
            }
            auto ms = mean_std(column);
            const double se = std::max(ms.std / root, 1e-12);
            est.padding_shift = std::max(est.padding_shift, std::abs(ms.mean));
            if (std::abs(ms.mean) > 3.0 * se) est.padding_too_small = true;
        }
    }
    return est;
}

GapReport trace_formula_check(const IdsRun& ids, const DosEstimate& dos, std::vector<double> lambda_grid,
                              double tolerance, const ContinuityOptions& options) {
    if (!ids.spec.same_model(dos.spec)) throw ConfigError("trace_formula_check: IDS run and DOS estimate use different models");
    if (ids.normalization != Normalization::volume) {
        throw ConfigError("trace_formula_check compares against the volume-normalized IDS");
    }
    if (lambda_grid.empty()) lambda_grid = ids.lambda_grid;
    const double d = static_cast<double>(dos.spec.domain_size());
    const IdsScale& top = ids.largest();
    const DistributionFunction n_h = top.mean_distribution();
    const DistributionFunction rho = dos.mean_distribution().scaled(1.0 / d);

    const double span = lambda_grid.back() - lambda_grid.front();
    CdfDistanceOptions cdf;
    cdf.jump_tolerance = options.exclusion_pitches * grid_pitch(lambda_grid);
    cdf.jump_mass_floor = options.jump_mass_floor;
    cdf.cluster_width = 1e-8 * std::max(span, 1.0);
    CdfDistance dist = cdf_distance(n_h, rho, lambda_grid, cdf);

    GapReport rep;
    rep.tolerance = tolerance;
    rep.sup_gap = dist.sup_gap;
    rep.argmax = dist.argmax;
    std::vector<double> ids_col(top.realizations.size()), dos_col(dos.per_realization.size());
    for (double x : lambda_grid) {
        rep.lambda.push_back(x);
        rep.gap.push_back(std::abs(n_h(x) - rho(x)));
        for (std::size_t r = 0; r < ids_col.size(); ++r) ids_col[r] = top.realizations[r](x);
        for (std::size_t r = 0; r < dos_col.size(); ++r) dos_col[r] = dos.per_realization[r](x) / d;
        const double se_ids = mean_std(ids_col).std / std::sqrt(static_cast<double>(ids_col.size()));
        const double se_dos = mean_std(dos_col).std / std::sqrt(static_cast<double>(dos_col.size()));
        rep.std_error.push_back(std::hypot(se_ids, se_dos));
        rep.admitted.push_back(!std::binary_search(dist.excluded.begin(), dist.excluded.end(), x));
    }
    rep.pass = rep.sup_gap <= tolerance;
    return rep;
}

LaplaceReport laplace_route_check(const IdsRun& ids, const DosEstimate& dos, std::vector<double> t_grid,
                                  double tolerance, std::optional<double> shift) {
    if (!ids.spec.same_model(dos.spec)) throw ConfigError("laplace_route_check: IDS run and DOS estimate use different models");
    LaplaceReport rep;
    rep.tolerance = tolerance;
    rep.shift = shift.value_or(-ids.spec.spectral_bounds().first);
    const double d = static_cast<double>(dos.spec.domain_size());
    const IdsScale& top = ids.largest();
    const DistributionFunction n_h = top.mean_distribution().shifted(rep.shift);
    const DistributionFunction rho = dos.mean_distribution().shifted(rep.shift).scaled(1.0 / d);
    std::vector<double> ids_col(top.realizations.size()), dos_col(dos.per_realization.size());
    for (double t : t_grid) {
        rep.t.push_back(t);
        rep.ids_side.push_back(laplace_transform(n_h, t));
        rep.dos_side.push_back(laplace_transform(rho, t));
        for (std::size_t r = 0; r < ids_col.size(); ++r) {
            ids_col[r] = laplace_transform(top.realizations[r].shifted(rep.shift), t);
        }
        for (std::size_t r = 0; r < dos_col.size(); ++r) {
            dos_col[r] = laplace_transform(dos.per_realization[r].shifted(rep.shift), t) / d;
        }
        rep.std_error.push_back(std::hypot(mean_std(ids_col).std / std::sqrt(static_cast<double>(ids_col.size())),
                                           mean_std(dos_col).std / std::sqrt(static_cast<double>(dos_col.size()))));
        rep.max_gap = std::max(rep.max_gap, std::abs(rep.ids_side.back() - rep.dos_side.back()));
    }
    rep.pass = rep.max_gap <= tolerance;
    return rep;
}

BoundaryReport boundary_independence(const OperatorEnsembleSpec& spec, const FolnerSequence& folner, double t,
                                     std::size_t realizations, int padding) {
    if (!(t > 0.0)) throw DomainError("boundary_independence needs t > 0");
    if (realizations < 1) throw DomainError("boundary_independence needs at least one realization");
    spec.validate();
    for (const LatticeBox& box : folner.boxes) {
        if (box.padded(padding).site_count() > kDenseThreshold) {
            throw SizeError("padded box of " + std::to_string(box.padded(padding).site_count()) +
                            " sites exceeds the dense threshold");
        }
    }
    const std::size_t scales = folner.boxes.size();
    std::vector<double> dev(scales * realizations, 0.0);
    parallel_for(scales * realizations, [&](std::size_t job) {
        const std::size_t n = job / realizations;
        const std::size_t r = job % realizations;
        const LatticeBox& box = folner.boxes[n];
        SymmetricOperator outer = spec.build(box.padded(padding), r);
        SymmetricOperator inner = restrict(outer, box);
        const auto domain = box_sites(box);
        const SpectralFunction heat = Exponential{t};
        const double with_padding = localized_trace(heat, outer, domain);
        const double dirichlet = localized_trace(heat, inner, domain);
        dev[job] = std::abs(with_padding - dirichlet) / static_cast<double>(box.site_count());
    });
    BoundaryReport rep;
    for (std::size_t n = 0; n < scales; ++n) {
        rep.volumes.push_back(folner.boxes[n].site_count());
        rep.deviation.push_back(*std::max_element(dev.begin() + static_cast<long>(n * realizations),
                                                  dev.begin() + static_cast<long>((n + 1) * realizations)));
    }
    rep.decreasing = true;
    for (std::size_t n = 0; n + 1 < scales; ++n) {
        const double a = rep.deviation[n], b = rep.deviation[n + 1];
        rep.ratio.push_back(b > 0.0 ? a / b : (a > 0.0 ? std::numeric_limits<double>::infinity() : 1.0));
        if (!(b < a || (a == 0.0 && b == 0.0))) rep.decreasing = false;
    }
    return rep;
}

SelfAveragingReport self_averaging_report(const IdsRun& ids, std::vector<double> lambda_grid) {
    if (ids.realizations < 20) {
        throw StatisticsError("self-averaging report needs at least 20 realizations, got " +
                              std::to_string(ids.realizations));
    }
    if (lambda_grid.empty()) lambda_grid = ids.lambda_grid;
    SelfAveragingReport rep;
    rep.lambda = lambda_grid;
    std::vector<double> column(ids.realizations);
    for (const IdsScale& scale : ids.scales) {
        rep.volumes.push_back(scale.box.site_count());
        std::vector<double> s;
        for (double x : lambda_grid) {
            for (std::size_t r = 0; r < ids.realizations; ++r) column[r] = scale.realizations[r](x);
            s.push_back(mean_std(column).std);
        }
        rep.std.push_back(std::move(s));
    }
    for (std::size_t n = 0; n + 1 < rep.std.size(); ++n) {
        std::vector<double> ratio;
        for (std::size_t j = 0; j < lambda_grid.size(); ++j) {
            ratio.push_back(rep.std[n][j] > 0.0 ? rep.std[n + 1][j] / rep.std[n][j]
                                                : std::numeric_limits<double>::quiet_NaN());
        }
        rep.ratio.push_back(std::move(ratio));
    }
    return rep;
}

DichotomyReport dichotomy_check(const IdsRun& ids, double a, double b) {
    if (!(a < b)) throw DomainError("dichotomy_check needs a < b");
    if (ids.scales.size() < 2) throw StatisticsError("dichotomy_check needs at least two scales");
    DichotomyReport rep;
    rep.a = a;
    rep.b = b;
    std::vector<double> xs, ys;
    bool any = false;
    for (const IdsScale& scale : ids.scales) {
        rep.volumes.push_back(scale.box.site_count());
        std::vector<long> counts;
        for (std::size_t r = 0; r < scale.realizations.size(); ++r) {
            const auto& f = scale.realizations[r];
            const double mass = f(b) - f.right_limit(a);
            const long k = std::lround(mass * scale.normalizations[r]);
            counts.push_back(k);
            any = any || k != 0;
            xs.push_back(static_cast<double>(scale.box.site_count()));
            ys.push_back(static_cast<double>(k));
        }
        rep.mean_counts.push_back(static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0L)) /
                                  static_cast<double>(counts.size()));
        rep.counts.push_back(std::move(counts));
    }
    if (!any) {
        rep.classification = SpectralClass::empty;
        return rep;
    }
    const double m = static_cast<double>(xs.size());
    const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
    const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    rep.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    const double intercept = ybar - rep.slope * xbar;
    if (xs.size() > 2 && sxx > 0.0) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double e = ys[i] - intercept - rep.slope * xs[i];
            ssr += e * e;
        }
        rep.slope_std_error = std::sqrt(ssr / (m - 2.0) / sxx);
    }
    rep.classification = rep.slope > 0.0 && rep.slope > 3.0 * rep.slope_std_error ? SpectralClass::infinite
                                                                                  : SpectralClass::bounded_nonzero;
    return rep;
}

double hausdorff_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto directed = [](std::span<const double> from, std::span<const double> to) {
        double worst = 0.0;
        for (double x : from) {
            auto it = std::lower_bound(to.begin(), to.end(), x);
            double best = std::numeric_limits<double>::infinity();
            if (it != to.end()) best = *it - x;
            if (it != to.begin()) best = std::min(best, x - *(it - 1));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

ConstancyReport spectrum_constancy_report(const IdsRun& ids) {
    if (ids.realizations < 10) {
        throw StatisticsError("spectrum constancy report needs at least 10 realizations, got " +
                              std::to_string(ids.realizations));
    }
    const IdsScale& top = ids.largest();
    ConstancyReport rep;
    rep.grid_pitch = grid_pitch(ids.lambda_grid);
    rep.union_min = std::numeric_limits<double>::infinity();
    rep.union_max = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t r = 0; r < top.realizations.size(); ++r) {
        auto loc = top.realizations[r].locations();
        if (loc.empty()) continue;
        any = true;
        rep.ranges.emplace_back(loc.front(), loc.back());
        rep.union_min = std::min(rep.union_min, loc.front());
        rep.union_max = std::max(rep.union_max, loc.back());
        for (std::size_t s = 0; s < r; ++s) {
            rep.max_hausdorff = std::max(rep.max_hausdorff, hausdorff_distance(loc, top.realizations[s].locations()));
        }
    }
    if (!any) {
        rep.union_min = rep.union_max = rep.support_min = rep.support_max = 0.0;
        rep.pass = true;
        return rep;
    }
    const double total = top.mean_distribution().total();
    const auto& grid = ids.lambda_grid;
    rep.support_min = grid.back();
    rep.support_max = grid.back();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (top.mean[j] > 0.0) {
            rep.support_min = grid[j];
            break;
        }
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (top.mean[j] >= total * (1.0 - 1e-12)) {
            rep.support_max = grid[j];
            break;
        }
    }
    rep.hull_gap = std::max(std::abs(rep.union_min - rep.support_min), std::abs(rep.union_max - rep.support_max));
    rep.pass = rep.hull_gap <= rep.grid_pitch * (1.0 + 1e-9);
    return rep;
}

}  // namespace ids
