#include "ids/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ids/delone.hpp"
#include "ids/errors.hpp"
#include "ids/rng.hpp"
#include "ids/spectra.hpp"

namespace ids {

namespace {

std::uint64_t potential_counter(const Coord& c) noexcept {
    std::uint64_t key = 0;
    for (int k = 0; k < kMaxDimension; ++k) {
        key |= static_cast<std::uint64_t>(static_cast<std::int64_t>(c[k]) + (std::int64_t{1} << 20)) << (21 * k);
    }
    return key;
}

SymmetricOperator percolation_operator(const PercolationConfig& config, BoundaryMode mode, bool laplacian) {
    const LatticeBox& box = config.box;
    std::vector<std::size_t> position(box.site_count(), static_cast<std::size_t>(-1));
    std::vector<Coord> labels;
    for (std::size_t i = 0; i < box.site_count(); ++i) {
        if (config.occupied[i]) {
            position[i] = labels.size();
            labels.push_back(box.coordinate(i));
        }
    }
    std::vector<SymmetricOperator::Entry> entries;
    for (std::size_t i = 0; i < box.site_count(); ++i) {
        if (!config.occupied[i]) continue;
        double degree = 0.0;
        for (std::size_t j : lattice_neighbours(box, i, mode)) {
            if (!config.occupied[j]) continue;
            degree += 1.0;
            if (j > i) entries.push_back({position[i], position[j], laplacian ? -1.0 : 1.0});
        }
        if (laplacian && degree > 0.0) entries.push_back({position[i], position[i], degree});
    }
    return SymmetricOperator(std::move(labels), LabelKind::lattice, std::move(entries), 1);
}

}  // namespace

SymmetricOperator::SymmetricOperator(std::vector<Coord> labels, LabelKind kind, std::vector<Entry> entries,
                                     int hopping_range)
    : labels_(std::move(labels)), kind_(kind), hopping_range_(hopping_range) {
    const std::size_t n = labels_.size();
    for (Entry& e : entries) {
        if (e.row >= n || e.col >= n) throw OutOfRange("operator entry index outside the label range");
        if (e.row > e.col) std::swap(e.row, e.col);
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (const Entry& e : entries) {
        if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
            entries_.back().value += e.value;
        } else {
            entries_.push_back(e);
        }
    }
    std::erase_if(entries_, [](const Entry& e) { return e.value == 0.0; });

    sorted_by_label_.resize(n);
    std::iota(sorted_by_label_.begin(), sorted_by_label_.end(), std::size_t{0});
    std::sort(sorted_by_label_.begin(), sorted_by_label_.end(),
              [&](std::size_t a, std::size_t b) { return labels_[a] < labels_[b]; });
    for (std::size_t k = 1; k < n; ++k) {
        if (labels_[sorted_by_label_[k]] == labels_[sorted_by_label_[k - 1]]) {
            throw DomainError("operator site labels must be distinct");
        }
    }
}

double SymmetricOperator::entry(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{i, j, 0.0}, [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    return it != entries_.end() && it->row == i && it->col == j ? it->value : 0.0;
}

std::size_t SymmetricOperator::find(const Coord& label) const {
    auto it = std::lower_bound(sorted_by_label_.begin(), sorted_by_label_.end(), label,
                               [&](std::size_t a, const Coord& l) { return labels_[a] < l; });
    return it != sorted_by_label_.end() && labels_[*it] == label ? *it : dimension();
}

Eigen::MatrixXd SymmetricOperator::dense() const {
    if (dimension() > kDenseThreshold) {
        throw SizeError("operator of dimension " + std::to_string(dimension()) +
                        " exceeds the dense threshold " + std::to_string(kDenseThreshold) +
                        "; use a restricted or trace-only computation");
    }
    const auto n = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const Entry& e : entries_) {
        m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.value;
        m(static_cast<Eigen::Index>(e.col), static_cast<Eigen::Index>(e.row)) = e.value;
    }
    return m;
}

std::vector<std::vector<std::size_t>> SymmetricOperator::blocks() const {
    const std::size_t n = dimension();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto root = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Entry& e : entries_) {
        std::size_t a = root(e.row), b = root(e.col);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> slot(n, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = root(i);
        if (slot[r] == static_cast<std::size_t>(-1)) {
            slot[r] = out.size();
            out.emplace_back();
        }
        out[slot[r]].push_back(i);
    }
    return out;
}

SymmetricOperator SymmetricOperator::principal(std::span<const std::size_t> sites) const {
    std::vector<std::size_t> position(dimension(), static_cast<std::size_t>(-1));
    std::vector<Coord> labels;
    labels.reserve(sites.size());
    for (std::size_t k = 0; k < sites.size(); ++k) {
        position[sites[k]] = k;
        labels.push_back(labels_[sites[k]]);
    }
    std::vector<Entry> entries;
    for (const Entry& e : entries_) {
        std::size_t a = position[e.row], b = position[e.col];
        if (a != static_cast<std::size_t>(-1) && b != static_cast<std::size_t>(-1)) entries.push_back({a, b, e.value});
    }
    return SymmetricOperator(std::move(labels), kind_, std::move(entries), hopping_range_);
}

double SymmetricOperator::max_abs_row_sum() const {
    std::vector<double> rows(dimension(), 0.0);
    for (const Entry& e : entries_) {
        rows[e.row] += std::abs(e.value);
        if (e.col != e.row) rows[e.col] += std::abs(e.value);
    }
    return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

std::string SymmetricOperator::to_coordinate_text() const {
    nlohmann::json header;
    header["dimension"] = dimension();
    header["hopping_range"] = hopping_range_;
    header["label_kind"] = kind_ == LabelKind::lattice ? "lattice" : "point";
    auto labels = nlohmann::json::array();
    for (const Coord& c : labels_) labels.push_back({c[0], c[1], c[2]});
    header["labels"] = std::move(labels);
    std::ostringstream os;
    os << header.dump() << '\n';
    os.precision(17);
    for (const Entry& e : entries_) os << e.row << ' ' << e.col << ' ' << e.value << '\n';
    return os.str();
}

SymmetricOperator adjacency_operator(const PercolationConfig& config, BoundaryMode mode) {
    return percolation_operator(config, mode, false);
}

SymmetricOperator laplacian_operator(const PercolationConfig& config, BoundaryMode mode) {
    return percolation_operator(config, mode, true);
}

double anderson_potential(double low, double high, std::uint64_t seed, const Coord& site) noexcept {
    return low + (high - low) * rng::uniform(seed, rng::Stream::potential, potential_counter(site));
}

SymmetricOperator anderson_operator(const LatticeBox& box, double potential_low, double potential_high,
                                    double hopping, std::uint64_t seed, BoundaryMode mode) {
    if (!(potential_low <= potential_high)) throw DomainError("Anderson potential bounds are inverted");
    std::vector<Coord> labels;
    std::vector<SymmetricOperator::Entry> entries;
    for (std::size_t i = 0; i < box.site_count(); ++i) {
        labels.push_back(box.coordinate(i));
        entries.push_back({i, i, anderson_potential(potential_low, potential_high, seed, labels.back())});
        for (std::size_t j : lattice_neighbours(box, i, mode)) {
            if (j > i) entries.push_back({i, j, hopping});
        }
    }
    return SymmetricOperator(std::move(labels), LabelKind::lattice, std::move(entries), hopping == 0.0 ? 0 : 1);
}

SymmetricOperator delone_operator(const VoronoiAdjacency& adjacency, CellMode mode) {
    const std::size_t n = adjacency.boundary.size();
    std::vector<std::size_t> position(n, static_cast<std::size_t>(-1));
    std::vector<Coord> labels;
    for (std::size_t i = 0; i < n; ++i) {
        if (mode == CellMode::keep_boundary || !adjacency.boundary[i]) {
            position[i] = labels.size();
            labels.push_back({static_cast<std::int32_t>(i), 0, 0});
        }
    }
    std::vector<SymmetricOperator::Entry> entries;
    for (auto [i, j] : adjacency.edges) {
        if (position[i] != static_cast<std::size_t>(-1) && position[j] != static_cast<std::size_t>(-1)) {
            entries.push_back({position[i], position[j], 1.0});
        }
    }
    return SymmetricOperator(std::move(labels), LabelKind::point, std::move(entries), 1);
}

SymmetricOperator restrict(const SymmetricOperator& op, const std::function<bool(const Coord&)>& region) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < op.dimension(); ++i) {
        if (region(op.labels()[i])) keep.push_back(i);
    }
    SymmetricOperator out = op.principal(keep);
    out.empty_region_ = keep.empty();
    return out;
}

SymmetricOperator restrict(const SymmetricOperator& op, const LatticeBox& box) {
    return restrict(op, [&box](const Coord& c) { return box.contains(c); });
}

void validate(const SpectralFunction& f) {
    std::visit(
        [](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                if (!(g.t >= 0.0)) throw DomainError("exponential spectral function needs t >= 0");
            } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
                if (g.knots.size() < 2 || g.knots.size() != g.values.size()) {
                    throw DomainError("piecewise-linear function needs >= 2 knots with one value each");
                }
                if (!std::is_sorted(g.knots.begin(), g.knots.end()) ||
                    std::adjacent_find(g.knots.begin(), g.knots.end()) != g.knots.end()) {
                    throw DomainError("piecewise-linear knots must be strictly increasing");
                }
                if (g.values.front() != 0.0 || g.values.back() != 0.0) {
                    throw DomainError("piecewise-linear function must vanish at its end knots");
                }
            }
        },
        f);
}

double evaluate(const SpectralFunction& f, double x) {
    return std::visit(
        [x](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, IndicatorBelow>) {
                return x < g.lambda ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return std::exp(-g.t * (x + g.shift));
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                double acc = 0.0;
                for (auto it = g.coefficients.rbegin(); it != g.coefficients.rend(); ++it) acc = acc * x + *it;
                return acc;
            } else {
                if (x <= g.knots.front() || x >= g.knots.back()) return 0.0;
                auto it = std::upper_bound(g.knots.begin(), g.knots.end(), x);
                auto k = static_cast<std::size_t>(it - g.knots.begin());
                double w = (x - g.knots[k - 1]) / (g.knots[k] - g.knots[k - 1]);
                return (1.0 - w) * g.values[k - 1] + w * g.values[k];
            }
        },
        f);
}

Eigen::MatrixXd heat_semigroup(const SymmetricOperator& op, double t) {
    if (!(t >= 0.0)) throw DomainError("heat semigroup needs t >= 0");
    if (op.dimension() > kDenseThreshold) {
        throw SizeError("heat_semigroup: dimension " + std::to_string(op.dimension()) +
                        " exceeds the dense threshold; use localized_trace instead");
    }
    const auto n = static_cast<Eigen::Index>(op.dimension());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (const BlockEigensystem& b : eigensystem(op)) {
        Eigen::VectorXd weights = (-t * b.values.array()).exp().matrix();
        Eigen::MatrixXd block = b.vectors * weights.asDiagonal() * b.vectors.transpose();
        for (std::size_t r = 0; r < b.sites.size(); ++r) {
            for (std::size_t c = 0; c < b.sites.size(); ++c) {
                out(static_cast<Eigen::Index>(b.sites[r]), static_cast<Eigen::Index>(b.sites[c])) =
                    block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            }
        }
    }
    // Symmetrize exactly; the two triangles differ only by rounding.
    Eigen::MatrixXd sym = 0.5 * (out + out.transpose());
    return sym;
}

namespace {

// Per-eigenpair weight sum_{x in D} v_k(x)^2, blockwise.
template <typename Visit>
void visit_local_weights(const SymmetricOperator& op, std::span<const Coord> domain, Visit&& visit) {
    std::vector<char> in_domain(op.dimension(), 0);
    for (const Coord& c : domain) {
        std::size_t i = op.find(c);
        if (i < op.dimension()) in_domain[i] = 1;
    }
    auto blocks = op.blocks();
    // Only blocks meeting the domain need diagonalizing.
    std::vector<std::size_t> wanted;
    for (const auto& b : blocks) {
        if (std::any_of(b.begin(), b.end(), [&](std::size_t i) { return in_domain[i] != 0; })) {
            wanted.insert(wanted.end(), b.begin(), b.end());
        }
    }
    std::sort(wanted.begin(), wanted.end());
    SymmetricOperator sub = op.principal(wanted);
    for (const BlockEigensystem& b : eigensystem(sub)) {
        for (Eigen::Index k = 0; k < b.values.size(); ++k) {
            double w = 0.0;
            for (std::size_t r = 0; r < b.sites.size(); ++r) {
                if (in_domain[wanted[b.sites[r]]]) {
                    double v = b.vectors(static_cast<Eigen::Index>(r), k);
                    w += v * v;
                }
            }
            visit(b.values(k), w);
        }
    }
}

}  // namespace

double localized_trace(const SpectralFunction& f, const SymmetricOperator& op, std::span<const Coord> domain) {
    validate(f);
    double sum = 0.0;
    visit_local_weights(op, domain, [&](double lambda, double w) { sum += evaluate(f, lambda) * w; });
    return sum;
}

DistributionFunction localized_spectral_distribution(const SymmetricOperator& op, std::span<const Coord> domain) {
    std::vector<DistributionFunction::Jump> jumps;
    visit_local_weights(op, domain, [&](double lambda, double w) {
        if (w > 0.0) jumps.push_back({lambda, w});
    });
    return DistributionFunction::from_jumps(std::move(jumps));
}

}  // namespace ids
