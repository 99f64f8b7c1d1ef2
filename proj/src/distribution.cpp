#include "ids/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ids/errors.hpp"

namespace ids {

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

DistributionFunction DistributionFunction::from_jumps(std::vector<Jump> jumps, double base) {
    if (!(base >= 0.0)) throw DomainError("distribution base value must be nonnegative");
    std::sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.location < b.location; });
    DistributionFunction f;
    f.base_ = base;
    double running = base;
    for (const Jump& j : jumps) {
        if (!(j.weight >= 0.0) || !std::isfinite(j.location)) {
            throw DomainError("distribution jumps need finite locations and nonnegative weights");
        }
        if (j.weight == 0.0) continue;
        running += j.weight;
        if (!f.locations_.empty() && f.locations_.back() == j.location) {
            f.cumulative_.back() = running;
        } else {
            f.locations_.push_back(j.location);
            f.cumulative_.push_back(running);
        }
    }
    return f;
}

DistributionFunction DistributionFunction::from_cumulative(std::vector<double> locations,
                                                          std::vector<double> cumulative, double base) {
    if (locations.size() != cumulative.size()) throw DomainError("one cumulative value per location is required");
    if (!(base >= 0.0)) throw DomainError("distribution base value must be nonnegative");
    for (std::size_t k = 0; k < locations.size(); ++k) {
        const double before = k == 0 ? base : cumulative[k - 1];
        if (!std::isfinite(locations[k]) || (k > 0 && !(locations[k] > locations[k - 1])) ||
            !(cumulative[k] > before)) {
            throw DomainError("cumulative values need strictly increasing locations and values");
        }
    }
    DistributionFunction f;
    f.base_ = base;
    f.locations_ = std::move(locations);
    f.cumulative_ = std::move(cumulative);
    return f;
}

DistributionFunction DistributionFunction::mixture(std::span<const DistributionFunction> parts,
                                                   std::span<const double> coefficients) {
    if (parts.size() != coefficients.size()) throw DomainError("mixture needs one coefficient per part");
    std::vector<Jump> all;
    double base = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!(coefficients[i] >= 0.0)) throw DomainError("mixture coefficients must be nonnegative");
        base += coefficients[i] * parts[i].base();
        for (const Jump& j : parts[i].jumps()) all.push_back({j.location, coefficients[i] * j.weight});
    }
    return from_jumps(std::move(all), base);
}

double DistributionFunction::operator()(double x) const noexcept {
    auto it = std::lower_bound(locations_.begin(), locations_.end(), x);
    auto k = static_cast<std::size_t>(it - locations_.begin());
    return k == 0 ? base_ : cumulative_[k - 1];
}

double DistributionFunction::right_limit(double x) const noexcept {
    auto it = std::upper_bound(locations_.begin(), locations_.end(), x);
    auto k = static_cast<std::size_t>(it - locations_.begin());
    return k == 0 ? base_ : cumulative_[k - 1];
}

double DistributionFunction::weight(std::size_t k) const noexcept {
    return cumulative_[k] - (k == 0 ? base_ : cumulative_[k - 1]);
}

std::vector<DistributionFunction::Jump> DistributionFunction::jumps() const {
    std::vector<Jump> out;
    out.reserve(locations_.size());
    for (std::size_t k = 0; k < locations_.size(); ++k) out.push_back({locations_[k], weight(k)});
    return out;
}

DistributionFunction DistributionFunction::scaled(double factor) const {
    if (!(factor >= 0.0)) throw DomainError("scale factor must be nonnegative");
    auto j = jumps();
    for (auto& x : j) x.weight *= factor;
    return from_jumps(std::move(j), base_ * factor);
}

DistributionFunction DistributionFunction::shifted(double delta) const {
    auto j = jumps();
    for (auto& x : j) x.location += delta;
    return from_jumps(std::move(j), base_);
}

DistributionFunction DistributionFunction::with_base(double base) const {
    return from_jumps(jumps(), base);
}

std::string DistributionFunction::to_csv() const {
    std::ostringstream os;
    os << "lambda,N_left,N_right\n";
    for (std::size_t k = 0; k < locations_.size(); ++k) {
        os << format_double(locations_[k]) << ',' << format_double(k == 0 ? base_ : cumulative_[k - 1]) << ','
           << format_double(cumulative_[k]) << '\n';
    }
    return os.str();
}

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
    for (const Atom& a : atoms) {
        if (!(a.weight > 0.0)) throw DomainError("atom weights must be positive");
        if (!atoms_.empty() && atoms_.back().location == a.location) {
            atoms_.back().weight += a.weight;
        } else {
            atoms_.push_back(a);
        }
        total_ += a.weight;
    }
}

DistributionFunction AtomicMeasure::distribution() const {
    std::vector<DistributionFunction::Jump> j;
    for (const Atom& a : atoms_) j.push_back({a.location, a.weight});
    return DistributionFunction::from_jumps(std::move(j));
}

std::string AtomicMeasure::to_csv() const {
    std::ostringstream os;
    os << "location,weight\n";
    for (const Atom& a : atoms_) os << format_double(a.location) << ',' << format_double(a.weight) << '\n';
    return os.str();
}

DistributionFunction counting_function(std::span<const double> eigenvalues, double normalization,
                                       double merge_tolerance) {
    if (!(normalization > 0.0)) throw DomainError("counting-function normalization must be positive");
    if (eigenvalues.empty()) return {};
    std::vector<double> sorted(eigenvalues.begin(), eigenvalues.end());
    std::sort(sorted.begin(), sorted.end());
    const double width = sorted.back() - sorted.front();
    const double tol = merge_tolerance * width;
    std::vector<double> locations, cumulative;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] - sorted[i] <= tol) ++j;
        locations.push_back(sorted[i]);
        // Counts divided once, so N takes exact values such as 1/2.
        cumulative.push_back(static_cast<double>(j + 1) / normalization);
        i = j + 1;
    }
    return DistributionFunction::from_cumulative(std::move(locations), std::move(cumulative));
}

double laplace_transform(const DistributionFunction& n, double t) {
    if (!(t > 0.0)) throw DomainError("Laplace transform needs t > 0");
    double sum = 0.0;
    for (std::size_t k = 0; k < n.jump_count(); ++k) sum += std::exp(-t * n.locations()[k]) * n.weight(k);
    return sum;
}

double laplace_agreement(const DistributionFunction& a, const DistributionFunction& b,
                         std::span<const double> t_grid) {
    double gap = 0.0;
    for (double t : t_grid) gap = std::max(gap, std::abs(laplace_transform(a, t) - laplace_transform(b, t)));
    return gap;
}

std::vector<double> significant_jumps(const DistributionFunction& n, double cluster_width, double mass_floor) {
    std::vector<double> out;
    const auto loc = n.locations();
    std::size_t i = 0;
    while (i < loc.size()) {
        std::size_t j = i;
        double mass = n.weight(i);
        while (j + 1 < loc.size() && loc[j + 1] - loc[j] <= cluster_width) {
            ++j;
            mass += n.weight(j);
        }
        if (mass >= mass_floor) {
            // every member of a pooled cluster counts as a jump location
            for (std::size_t k = i; k <= j; ++k) out.push_back(loc[k]);
        }
        i = j + 1;
    }
    return out;
}

CdfDistance cdf_distance(const DistributionFunction& a, const DistributionFunction& b, std::span<const double> grid,
                         const CdfDistanceOptions& options) {
    if (grid.empty()) throw DegeneracyError("cdf_distance needs a nonempty grid");
    std::vector<double> jumps = significant_jumps(a, options.cluster_width, options.jump_mass_floor);
    auto more = significant_jumps(b, options.cluster_width, options.jump_mass_floor);
    jumps.insert(jumps.end(), more.begin(), more.end());
    std::sort(jumps.begin(), jumps.end());
    auto near_jump = [&](double x) {
        auto it = std::lower_bound(jumps.begin(), jumps.end(), x - options.jump_tolerance);
        return it != jumps.end() && *it <= x + options.jump_tolerance;
    };
    CdfDistance out;
    for (double x : grid) {
        if (near_jump(x)) {
            out.excluded.push_back(x);
            continue;
        }
        ++out.admitted;
        double gap = std::abs(a(x) - b(x));
        if (out.admitted == 1 || gap > out.sup_gap) {
            out.sup_gap = gap;
            out.argmax = x;
        }
    }
    if (out.admitted == 0) throw DegeneracyError("every grid point lies next to a jump; no continuity point admitted");
    return out;
}

namespace {

struct Window {
    std::size_t first = 0;
    std::size_t last = 0;  // inclusive
    double mass = -1.0;
};

// Heaviest window of jumps spanning at most `length`, restricted to runs of
// jumps not yet used.
Window best_window(std::span<const double> loc, std::span<const double> w, const std::vector<bool>& used,
                   double length) {
    Window best;
    std::size_t start = 0;
    double mass = 0.0;
    for (std::size_t end = 0; end < loc.size(); ++end) {
        if (used[end]) {
            start = end + 1;
            mass = 0.0;
            continue;
        }
        mass += w[end];
        while (loc[end] - loc[start] > length) {
            mass -= w[start];
            ++start;
        }
        if (mass > best.mass) best = {start, end, mass};
    }
    return best;
}

double optimal_k_interval_mass(std::span<const double> loc, std::span<const double> w, int k, double length) {
    const std::size_t m = loc.size();
    std::vector<double> prefix(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + w[i];
    // reach[i]: first jump index that fits in a window ending at jump i.
    std::vector<std::size_t> reach(m);
    std::size_t s = 0;
    for (std::size_t i = 0; i < m; ++i) {
        while (loc[i] - loc[s] > length) ++s;
        reach[i] = s;
    }
    std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0);
    for (int c = 1; c <= k; ++c) {
        cur[0] = 0.0;
        for (std::size_t i = 1; i <= m; ++i) {
            std::size_t first = reach[i - 1];
            cur[i] = std::max(cur[i - 1], prev[first] + prefix[i] - prefix[first]);
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

}  // namespace

PointPart point_part(const DistributionFunction& n, int k_max, double length_floor, double mass_floor) {
    if (k_max < 1) throw DomainError("point_part needs k_max >= 1");
    if (!(length_floor > 0.0) || !(mass_floor > 0.0)) {
        throw DomainError("point_part needs positive length_floor and mass_floor");
    }
    const auto loc = n.locations();
    std::vector<double> w(loc.size());
    for (std::size_t k = 0; k < loc.size(); ++k) w[k] = n.weight(k);

    PointPart out;
    std::vector<bool> used(loc.size(), false);
    std::vector<AtomicMeasure::Atom> atoms;
    for (int step = 0; step < k_max && !loc.empty(); ++step) {
        Window best = best_window(loc, w, used, length_floor);
        if (best.mass <= 0.0) break;
        double moment = 0.0;
        for (std::size_t i = best.first; i <= best.last; ++i) {
            used[i] = true;
            moment += w[i] * loc[i];
        }
        out.intervals.emplace_back(loc[best.first], loc[best.last]);
        out.greedy_mass += best.mass;
        out.largest_interval_mass = std::max(out.largest_interval_mass, best.mass);
        if (best.mass >= mass_floor) atoms.push_back({moment / best.mass, best.mass});
    }
    out.atoms = AtomicMeasure(std::move(atoms));
    out.optimal_mass = loc.empty() ? 0.0 : optimal_k_interval_mass(loc, w, k_max, length_floor);
    const double slack = 1e-12 * std::max(1.0, n.jump_mass());
    out.certified = out.greedy_mass + slack >= out.optimal_mass - out.largest_interval_mass;
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < points; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return out;
}

}  // namespace ids
