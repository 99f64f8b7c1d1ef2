#include "ids/delone.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ids/errors.hpp"
#include "ids/rng.hpp"

namespace ids {

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

double distance(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

// Uniform buckets for nearest-point queries.
class PointGrid {
public:
    PointGrid(std::span<const Point2> points, double cell) : points_(points), cell_(cell) {
        lo_ = {points[0][0], points[0][1]};
        Point2 hi = lo_;
        for (const Point2& p : points) {
            lo_[0] = std::min(lo_[0], p[0]);
            lo_[1] = std::min(lo_[1], p[1]);
            hi[0] = std::max(hi[0], p[0]);
            hi[1] = std::max(hi[1], p[1]);
        }
        nx_ = static_cast<long>(std::floor((hi[0] - lo_[0]) / cell_)) + 1;
        ny_ = static_cast<long>(std::floor((hi[1] - lo_[1]) / cell_)) + 1;
        buckets_.resize(static_cast<std::size_t>(nx_ * ny_));
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto [cx, cy] = cell_of(points[i]);
            buckets_[static_cast<std::size_t>(cy * nx_ + cx)].push_back(i);
        }
    }

    double nearest_distance(const Point2& q) const {
        double best = std::numeric_limits<double>::infinity();
        long qx = static_cast<long>(std::floor((q[0] - lo_[0]) / cell_));
        long qy = static_cast<long>(std::floor((q[1] - lo_[1]) / cell_));
        const long max_ring = std::max(nx_, ny_) + std::max(std::labs(qx), std::labs(qy)) + 1;
        for (long ring = 0; ring <= max_ring; ++ring) {
            // Every point in ring k is at least (k - 1) * cell away.
            if (ring > 1 && (ring - 1) * cell_ > best) break;
            for (long dy = -ring; dy <= ring; ++dy) {
                for (long dx = -ring; dx <= ring; ++dx) {
                    if (std::max(std::labs(dx), std::labs(dy)) != ring) continue;
                    long cx = qx + dx, cy = qy + dy;
                    if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) continue;
                    for (std::size_t i : buckets_[static_cast<std::size_t>(cy * nx_ + cx)]) {
                        best = std::min(best, distance(q, points_[i]));
                    }
                }
            }
        }
        return best;
    }

private:
    std::pair<long, long> cell_of(const Point2& p) const {
        long cx = std::clamp(static_cast<long>(std::floor((p[0] - lo_[0]) / cell_)), 0L, nx_ - 1);
        long cy = std::clamp(static_cast<long>(std::floor((p[1] - lo_[1]) / cell_)), 0L, ny_ - 1);
        return {cx, cy};
    }

    std::span<const Point2> points_;
    double cell_;
    Point2 lo_{};
    long nx_ = 1, ny_ = 1;
    std::vector<std::vector<std::size_t>> buckets_;
};

double min_pairwise_distance_2d(std::span<const Point2> points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
    double best = std::numeric_limits<double>::infinity();
    // Sweep in x; only points within `best` in x can improve.
    for (std::size_t a = 0; a < order.size(); ++a) {
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            const Point2& p = points[order[a]];
            const Point2& q = points[order[b]];
            if (q[0] - p[0] > best) break;
            best = std::min(best, distance(p, q));
        }
    }
    return best;
}

double covering_radius_2d(std::span<const Point2> points, const Window& window, double r_packing, double* pitch_out) {
    const double spacing = std::sqrt(window.volume() / static_cast<double>(points.size()));
    PointGrid grid(points, std::max(spacing, r_packing));
    auto probe = [&](double pitch) {
        double worst = 0.0;
        auto axis = [&](int k) {
            std::vector<double> v;
            for (double x = window.lo[k]; x < window.hi[k]; x += pitch) v.push_back(x);
            v.push_back(window.hi[k]);
            return v;
        };
        const auto xs = axis(0), ys = axis(1);
        for (double y : ys) {
            for (double x : xs) worst = std::max(worst, grid.nearest_distance({x, y}));
        }
        return worst;
    };
    double pitch = std::exp2(std::floor(std::log2(std::max(spacing, 1e-300) / 4.0)));
    double radius = probe(pitch);
    while (pitch > radius / 4.0) {
        pitch /= 2.0;
        radius = probe(pitch);
    }
    if (pitch_out) *pitch_out = pitch;
    return radius;
}

}  // namespace

double Window::volume() const noexcept {
    double v = hi[0] - lo[0];
    if (dimension == 2) v *= hi[1] - lo[1];
    return v;
}

bool Window::contains(const Point2& p) const noexcept {
    for (int k = 0; k < dimension; ++k) {
        if (p[k] < lo[k] || p[k] >= hi[k]) return false;
    }
    return true;
}

DeloneCertificate validate_delone(std::span<const Point2> points, const Window& window) {
    if (points.size() < 2) throw DomainError("a Delone certificate needs at least two points");
    if (window.dimension != 1 && window.dimension != 2) throw DomainError("Delone sets are 1- or 2-dimensional");
    if (!(window.volume() > 0.0)) throw DomainError("Delone window has zero volume");
    DeloneCertificate cert;
    if (window.dimension == 1) {
        std::vector<double> xs;
        for (const Point2& p : points) xs.push_back(p[0]);
        std::sort(xs.begin(), xs.end());
        cert.r_packing = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < xs.size(); ++i) {
            double gap = xs[i] - xs[i - 1];
            cert.r_packing = std::min(cert.r_packing, gap);
            // Midpoints of gaps inside the window are the farthest probes.
            double mid = 0.5 * (xs[i] + xs[i - 1]);
            if (mid >= window.lo[0] && mid <= window.hi[0]) cert.R_covering = std::max(cert.R_covering, gap / 2);
        }
        cert.R_covering = std::max({cert.R_covering, xs.front() - window.lo[0], window.hi[0] - xs.back()});
    } else {
        cert.r_packing = min_pairwise_distance_2d(points);
        if (cert.r_packing > 0.0) cert.R_covering = covering_radius_2d(points, window, cert.r_packing, &cert.probe_pitch);
    }
    if (!(cert.r_packing > 0.0)) throw DegeneracyError("Delone point set contains coincident points");
    return cert;
}

DeloneSet make_delone_set(int dimension, std::vector<Point2> points, const Window& window) {
    if (window.dimension != dimension) throw DomainError("window dimension does not match the point set");
    auto cert = validate_delone(points, window);
    return DeloneSet{dimension, std::move(points), window, cert.r_packing, cert.R_covering};
}

namespace {

std::vector<long long> fibonacci_coding(std::size_t length, double phase) {
    if (!(phase >= 0.0 && phase < 1.0)) throw DomainError("Fibonacci phase must lie in [0,1)");
    std::vector<long long> k(length);
    for (std::size_t n = 0; n < length; ++n) {
        k[n] = static_cast<long long>(std::floor(static_cast<double>(n) / kPhi + phase));
    }
    return k;
}

}  // namespace

std::vector<double> fibonacci_gaps(std::size_t length, double phase) {
    auto k = fibonacci_coding(length, phase);
    std::vector<double> gaps;
    for (std::size_t n = 1; n < length; ++n) gaps.push_back(1.0 + static_cast<double>(k[n] - k[n - 1]) * (kPhi - 1.0));
    return gaps;
}

DeloneSet fibonacci_chain(std::size_t length, double phase) {
    if (length < 2) throw DomainError("Fibonacci chain needs at least two points");
    auto k = fibonacci_coding(length, phase);
    std::vector<Point2> points(length);
    for (std::size_t n = 0; n < length; ++n) {
        points[n] = {static_cast<double>(n) + static_cast<double>(k[n]) * (kPhi - 1.0), 0.0};
    }
    Window window{1, {points.front()[0], 0.0}, {points.back()[0], 0.0}};
    return make_delone_set(1, std::move(points), window);
}

DeloneSet perturbed_lattice(const LatticeBox& box, double amplitude, std::uint64_t seed) {
    if (box.dimension() != 2) throw DomainError("perturbed_lattice needs a two-dimensional box");
    if (!(amplitude >= 0.0 && amplitude < 0.5)) throw DomainError("perturbation amplitude must lie in [0, 1/2)");
    std::vector<Point2> points(box.site_count());
    for (std::size_t i = 0; i < box.site_count(); ++i) {
        Coord c = box.coordinate(i);
        std::uint64_t key = (static_cast<std::uint64_t>(c[0] + (1 << 20)) << 21) ^ static_cast<std::uint64_t>(c[1] + (1 << 20));
        double ux = rng::uniform(seed, rng::Stream::geometry, 2 * key);
        double uy = rng::uniform(seed, rng::Stream::geometry, 2 * key + 1);
        points[i] = {c[0] + amplitude * (2.0 * ux - 1.0), c[1] + amplitude * (2.0 * uy - 1.0)};
    }
    Window window{2,
                  {box.offset(0) - 0.5, box.offset(1) - 0.5},
                  {box.offset(0) + box.side(0) - 0.5, box.offset(1) + box.side(1) - 0.5}};
    return make_delone_set(2, std::move(points), window);
}

std::vector<std::vector<std::size_t>> VoronoiAdjacency::neighbours() const {
    std::vector<std::vector<std::size_t>> out(boundary.size());
    for (auto [i, j] : edges) {
        out[i].push_back(j);
        out[j].push_back(i);
    }
    for (auto& list : out) std::sort(list.begin(), list.end());
    return out;
}

namespace {

VoronoiAdjacency adjacency_1d(const DeloneSet& set) {
    const std::size_t n = set.points.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return set.points[a][0] < set.points[b][0]; });
    VoronoiAdjacency adj;
    adj.boundary.assign(n, false);
    for (std::size_t k = 1; k < n; ++k) {
        adj.edges.emplace_back(std::min(order[k - 1], order[k]), std::max(order[k - 1], order[k]));
    }
    // End cells are unbounded.
    adj.boundary[order.front()] = true;
    adj.boundary[order.back()] = true;
    std::sort(adj.edges.begin(), adj.edges.end());
    return adj;
}

struct Triangle {
    std::array<std::size_t, 3> v;  // counterclockwise
};

VoronoiAdjacency adjacency_2d(const DeloneSet& set) {
    const std::size_t n = set.points.size();
    std::vector<Point2> pts = set.points;
    Point2 lo = pts[0], hi = pts[0];
    for (const Point2& p : pts) {
        lo = {std::min(lo[0], p[0]), std::min(lo[1], p[1])};
        hi = {std::max(hi[0], p[0]), std::max(hi[1], p[1])};
    }
    const double extent = std::max({hi[0] - lo[0], hi[1] - lo[1], 1.0});
    const Point2 centre{0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])};
    const double s = 1e4 * extent;
    // Enclosing triangle; its vertices have the lowest tie-break priority.
    pts.push_back({centre[0] - 2 * s, centre[1] - s});
    pts.push_back({centre[0] + 2 * s, centre[1] - s});
    pts.push_back({centre[0], centre[1] + 2 * s});

    std::vector<Triangle> tris{{{n, n + 1, n + 2}}};
    std::vector<std::array<std::size_t, 4>> cocircular;
    std::vector<Triangle> kept;
    std::vector<std::pair<std::size_t, std::size_t>> cavity;
    for (std::size_t i = 0; i < n; ++i) {
        kept.clear();
        cavity.clear();
        for (const Triangle& t : tris) {
            bool degenerate = false;
            int s_in = geometry::incircle_perturbed(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]], pts[i],
                                                    {t.v[0], t.v[1], t.v[2], i}, &degenerate);
            if (degenerate && t.v[0] < n && t.v[1] < n && t.v[2] < n) {
                std::array<std::size_t, 4> q{t.v[0], t.v[1], t.v[2], i};
                std::sort(q.begin(), q.end());
                cocircular.push_back(q);
            }
            if (s_in > 0) {
                for (int e = 0; e < 3; ++e) cavity.emplace_back(t.v[e], t.v[(e + 1) % 3]);
            } else {
                kept.push_back(t);
            }
        }
        if (cavity.empty()) throw DegeneracyError("point insertion found an empty cavity");
        std::sort(cavity.begin(), cavity.end());
        for (auto [a, b] : cavity) {
            // Interior cavity edges appear in both directions.
            if (std::binary_search(cavity.begin(), cavity.end(), std::make_pair(b, a))) continue;
            kept.push_back({{a, b, i}});
        }
        std::swap(tris, kept);
    }

    VoronoiAdjacency adj;
    adj.boundary.assign(n, false);
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> incident;
    std::vector<Point2> centres(tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const auto& v = tris[t].v;
        const bool finite = v[0] < n && v[1] < n && v[2] < n;
        if (finite) {
            centres[t] = geometry::circumcenter(pts[v[0]], pts[v[1]], pts[v[2]]);
            const Point2& c = centres[t];
            const bool inside = c[0] > set.window.lo[0] && c[0] < set.window.hi[0] && c[1] > set.window.lo[1] &&
                                c[1] < set.window.hi[1];
            if (!inside) {
                for (std::size_t k : v) adj.boundary[k] = true;
            }
        } else {
            for (std::size_t k : v) {
                if (k < n) adj.boundary[k] = true;
            }
        }
        for (int e = 0; e < 3; ++e) {
            std::size_t a = v[e], b = v[(e + 1) % 3];
            if (a < n && b < n) incident[{std::min(a, b), std::max(a, b)}].push_back(t);
        }
    }
    const double min_face = 1e-9 * set.r_packing;
    for (const auto& [edge, ts] : incident) {
        bool unbounded = ts.size() < 2;
        for (std::size_t t : ts) {
            const auto& v = tris[t].v;
            if (v[0] >= n || v[1] >= n || v[2] >= n) unbounded = true;
        }
        if (!unbounded) {
            const Point2& c1 = centres[ts[0]];
            const Point2& c2 = centres[ts[1]];
            if (distance(c1, c2) <= min_face) {
                ++adj.filtered_edges;
                continue;
            }
        }
        adj.edges.push_back(edge);
    }
    std::sort(cocircular.begin(), cocircular.end());
    cocircular.erase(std::unique(cocircular.begin(), cocircular.end()), cocircular.end());
    adj.cocircular = std::move(cocircular);
    return adj;
}

}  // namespace

VoronoiAdjacency voronoi_adjacency(const DeloneSet& set) {
    if (set.points.size() < 2) throw DomainError("Voronoi adjacency needs at least two points");
    if (!(set.r_packing > 0.0)) throw DegeneracyError("Delone set has not been validated");
    return set.dimension == 1 ? adjacency_1d(set) : adjacency_2d(set);
}

double point_density(const DeloneSet& set, const Window& window) {
    if (!(window.volume() > 0.0)) throw DomainError("point density needs a window of positive volume");
    auto count = std::count_if(set.points.begin(), set.points.end(), [&](const Point2& p) { return window.contains(p); });
    return static_cast<double>(count) / window.volume();
}

std::string delone_to_csv(const DeloneSet& set) {
    std::ostringstream os;
    os.precision(17);
    for (const Point2& p : set.points) {
        os << p[0];
        if (set.dimension == 2) os << ',' << p[1];
        os << '\n';
    }
    return os.str();
}

std::string delone_to_json(const DeloneSet& set) {
    nlohmann::json j;
    j["dimension"] = set.dimension;
    auto pts = nlohmann::json::array();
    for (const Point2& p : set.points) {
        if (set.dimension == 1) {
            pts.push_back({p[0]});
        } else {
            pts.push_back({p[0], p[1]});
        }
    }
    j["points"] = std::move(pts);
    std::vector<double> lo(set.window.lo.begin(), set.window.lo.begin() + set.dimension);
    std::vector<double> hi(set.window.hi.begin(), set.window.hi.begin() + set.dimension);
    j["window"] = {{"lo", lo}, {"hi", hi}};
    j["r_packing"] = set.r_packing;
    j["R_covering"] = set.R_covering;
    return j.dump();
}

DeloneSet delone_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        const int d = j.at("dimension").get<int>();
        if (d != 1 && d != 2) throw ConfigError("Delone dimension must be 1 or 2");
        Window w{d, {0, 0}, {0, 0}};
        auto lo = j.at("window").at("lo").get<std::vector<double>>();
        auto hi = j.at("window").at("hi").get<std::vector<double>>();
        if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d) throw ConfigError("window rank mismatch");
        for (int k = 0; k < d; ++k) {
            w.lo[k] = lo[k];
            w.hi[k] = hi[k];
        }
        std::vector<Point2> pts;
        for (const auto& p : j.at("points")) {
            auto v = p.get<std::vector<double>>();
            if (static_cast<int>(v.size()) != d) throw ConfigError("point rank mismatch");
            pts.push_back({v[0], d == 2 ? v[1] : 0.0});
        }
        DeloneSet set = make_delone_set(d, std::move(pts), w);
        // The stored certificate must agree with the recomputed one.
        if (j.contains("r_packing") && std::abs(j["r_packing"].get<double>() - set.r_packing) > 1e-12 * set.r_packing) {
            throw ConfigError("stored r_packing does not match the point set");
        }
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed Delone JSON: ") + e.what());
    }
}

DeloneSet delone_from_csv(const std::string& text, const Window& window) {
    std::istringstream is(text);
    std::string line;
    std::vector<Point2> pts;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Point2 p{0.0, 0.0};
        char comma = 0;
        ls >> p[0];
        if (window.dimension == 2) ls >> comma >> p[1];
        if (!ls) throw ConfigError("malformed Delone CSV line: " + line);
        pts.push_back(p);
    }
    return make_delone_set(window.dimension, std::move(pts), window);
}

}  // namespace ids
