#include "ids/lattice.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "ids/errors.hpp"
#include "ids/rng.hpp"

namespace ids {

namespace {

constexpr std::int64_t kCoordBias = std::int64_t{1} << 20;

std::uint64_t coordinate_counter(const Coord& c) noexcept {
    std::uint64_t key = 0;
    for (int k = 0; k < kMaxDimension; ++k) {
        key |= static_cast<std::uint64_t>(c[k] + kCoordBias) << (21 * k);
    }
    return key;
}

int positive_mod(int a, int m) noexcept {
    int r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace

LatticeBox::LatticeBox(int dimension, std::span<const int> sides, std::span<const int> offset)
    : dimension_(dimension) {
    if (dimension < 1 || dimension > kMaxDimension) {
        throw DomainError("lattice dimension must be 1, 2 or 3, got " + std::to_string(dimension));
    }
    if (static_cast<int>(sides.size()) != dimension || static_cast<int>(offset.size()) != dimension) {
        throw DomainError("box sides/offset must have one entry per dimension");
    }
    count_ = 1;
    for (int k = 0; k < dimension; ++k) {
        if (sides[k] < 1) throw DomainError("box side lengths must be positive");
        if (offset[k] <= -kCoordBias || offset[k] + sides[k] >= kCoordBias) {
            throw DomainError("box exceeds the supported coordinate range");
        }
        sides_[k] = sides[k];
        offset_[k] = offset[k];
        count_ *= static_cast<std::size_t>(sides[k]);
    }
}

LatticeBox LatticeBox::centered(int dimension, std::span<const int> sides) {
    std::vector<int> offset(sides.size());
    std::transform(sides.begin(), sides.end(), offset.begin(), [](int s) { return -(s / 2); });
    return LatticeBox(dimension, sides, offset);
}

LatticeBox LatticeBox::cube(int dimension, int side) {
    std::vector<int> sides(static_cast<std::size_t>(std::max(dimension, 0)), side);
    return centered(dimension, sides);
}

Coord LatticeBox::coordinate(std::size_t index) const {
    if (index >= count_) throw OutOfRange("site index outside box");
    Coord c{0, 0, 0};
    for (int k = 0; k < dimension_; ++k) {
        c[k] = static_cast<std::int32_t>(index % static_cast<std::size_t>(sides_[k])) + offset_[k];
        index /= static_cast<std::size_t>(sides_[k]);
    }
    return c;
}

std::size_t LatticeBox::index(const Coord& c) const {
    if (!contains(c)) throw OutOfRange("coordinate outside box");
    std::size_t idx = 0;
    for (int k = dimension_ - 1; k >= 0; --k) {
        idx = idx * static_cast<std::size_t>(sides_[k]) + static_cast<std::size_t>(c[k] - offset_[k]);
    }
    return idx;
}

bool LatticeBox::contains(const Coord& c) const noexcept {
    for (int k = 0; k < kMaxDimension; ++k) {
        if (k >= dimension_) {
            if (c[k] != 0) return false;
            continue;
        }
        if (c[k] < offset_[k] || c[k] >= offset_[k] + sides_[k]) return false;
    }
    return true;
}

bool LatticeBox::contains(const LatticeBox& inner) const noexcept {
    if (inner.dimension_ != dimension_) return false;
    for (int k = 0; k < dimension_; ++k) {
        if (inner.offset_[k] < offset_[k]) return false;
        if (inner.offset_[k] + inner.sides_[k] > offset_[k] + sides_[k]) return false;
    }
    return true;
}

std::size_t LatticeBox::boundary_site_count() const noexcept {
    std::size_t interior = 1;
    for (int k = 0; k < dimension_; ++k) {
        interior *= static_cast<std::size_t>(std::max(sides_[k] - 2, 0));
    }
    return count_ - interior;
}

LatticeBox LatticeBox::padded(int radius) const {
    if (radius < 0) throw DomainError("padding radius must be nonnegative");
    auto s = sides();
    auto o = offsets();
    for (int k = 0; k < dimension_; ++k) {
        s[k] += 2 * radius;
        o[k] -= radius;
    }
    return LatticeBox(dimension_, s, o);
}

LatticeBox LatticeBox::shifted(const Coord& shift) const {
    auto s = sides();
    auto o = offsets();
    for (int k = 0; k < dimension_; ++k) o[k] += shift[k];
    return LatticeBox(dimension_, s, o);
}

FolnerSequence folner_boxes(int dimension, std::span<const int> schedule, std::span<const int> aspect) {
    if (schedule.empty()) throw InvalidSchedule("Følner schedule must contain at least one side length");
    std::vector<int> ratio(static_cast<std::size_t>(std::max(dimension, 1)), 1);
    if (!aspect.empty()) {
        if (static_cast<int>(aspect.size()) != dimension) {
            throw InvalidSchedule("aspect must have one entry per dimension");
        }
        for (int a : aspect) {
            if (a < 1) throw InvalidSchedule("aspect entries must be positive");
        }
        ratio.assign(aspect.begin(), aspect.end());
    }
    FolnerSequence seq;
    seq.dimension = dimension;
    double previous_ratio = 2.0;
    for (std::size_t n = 0; n < schedule.size(); ++n) {
        if (schedule[n] < 1) throw InvalidSchedule("side lengths must be positive");
        if (n > 0 && schedule[n] <= schedule[n - 1]) {
            throw InvalidSchedule("Følner schedule must be strictly increasing, got " +
                                  std::to_string(schedule[n - 1]) + " then " + std::to_string(schedule[n]));
        }
        std::vector<int> sides(ratio.size());
        for (std::size_t k = 0; k < sides.size(); ++k) sides[k] = schedule[n] * ratio[k];
        LatticeBox box = LatticeBox::centered(dimension, sides);
        if (n > 0 && !box.contains(seq.boxes.back())) {
            throw InvalidSchedule("Følner boxes are not nested at scale " + std::to_string(n));
        }
        double r = static_cast<double>(box.boundary_site_count()) / static_cast<double>(box.site_count());
        if (n > 0 && !(r < previous_ratio)) {
            throw InvalidSchedule("boundary ratio does not decrease at scale " + std::to_string(n));
        }
        previous_ratio = r;
        seq.boxes.push_back(box);
    }
    return seq;
}

std::size_t PercolationConfig::occupied_count() const noexcept {
    return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), std::uint8_t{1}));
}

bool site_occupied(double p, std::uint64_t seed, const Coord& c) noexcept {
    return rng::uniform(seed, rng::Stream::occupancy, coordinate_counter(c)) < p;
}

PercolationConfig sample_percolation(const LatticeBox& box, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("percolation probability must lie in [0,1]");
    PercolationConfig cfg{box, p, seed, std::vector<std::uint8_t>(box.site_count(), 0)};
    for (std::size_t i = 0; i < box.site_count(); ++i) {
        cfg.occupied[i] = site_occupied(p, seed, box.coordinate(i)) ? 1 : 0;
    }
    return cfg;
}

PercolationConfig translate_config(const PercolationConfig& config, const Coord& shift, BoundaryMode mode,
                                   std::optional<LatticeBox> window) {
    const LatticeBox& box = config.box;
    const int d = box.dimension();
    for (int k = d; k < kMaxDimension; ++k) {
        if (shift[k] != 0) throw OutOfRange("shift has components beyond the lattice dimension");
    }
    if (mode == BoundaryMode::torus) {
        PercolationConfig out = config;
        for (std::size_t i = 0; i < box.site_count(); ++i) {
            Coord c = box.coordinate(i);
            Coord t = c;
            for (int k = 0; k < d; ++k) {
                t[k] = box.offset(k) + positive_mod(c[k] - box.offset(k) + shift[k], box.side(k));
            }
            out.occupied[box.index(t)] = config.occupied[i];
        }
        return out;
    }
    LatticeBox win = window.value_or(box);
    if (!box.contains(win)) throw OutOfRange("translation window is not inside the configuration box");
    LatticeBox target = win.shifted(shift);
    if (!box.contains(target)) throw OutOfRange("shift moves the window outside the configuration box");
    PercolationConfig out{target, config.p, config.seed, std::vector<std::uint8_t>(target.site_count(), 0)};
    for (std::size_t i = 0; i < win.site_count(); ++i) {
        Coord c = win.coordinate(i);
        Coord t = c;
        for (int k = 0; k < d; ++k) t[k] += shift[k];
        out.occupied[target.index(t)] = config.occupied[box.index(c)];
    }
    return out;
}

std::vector<std::size_t> lattice_neighbours(const LatticeBox& box, std::size_t index, BoundaryMode mode) {
    std::vector<std::size_t> out;
    const Coord c = box.coordinate(index);
    for (int k = 0; k < box.dimension(); ++k) {
        for (int step : {-1, 1}) {
            Coord n = c;
            n[k] += step;
            if (!box.contains(n)) {
                if (mode == BoundaryMode::open || box.side(k) < 2) continue;
                n[k] = box.offset(k) + positive_mod(n[k] - box.offset(k), box.side(k));
            }
            std::size_t j = box.index(n);
            if (j != index && std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
        }
    }
    return out;
}

std::vector<std::vector<std::size_t>> clusters(const PercolationConfig& config, BoundaryMode mode) {
    const std::size_t n = config.box.site_count();
    std::vector<std::int64_t> label(n, -1);
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (!config.occupied[s] || label[s] >= 0) continue;
        const auto id = static_cast<std::int64_t>(out.size());
        out.emplace_back();
        label[s] = id;
        stack.push_back(s);
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            out.back().push_back(v);
            for (std::size_t w : lattice_neighbours(config.box, v, mode)) {
                if (config.occupied[w] && label[w] < 0) {
                    label[w] = id;
                    stack.push_back(w);
                }
            }
        }
        std::sort(out.back().begin(), out.back().end());
    }
    return out;
}

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
        if (i + 1 < bytes.size()) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
        if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
        out += kB64[(chunk >> 18) & 63];
        out += kB64[(chunk >> 12) & 63];
        out += i + 1 < bytes.size() ? kB64[(chunk >> 6) & 63] : '=';
        out += i + 2 < bytes.size() ? kB64[chunk & 63] : '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    auto value = [](char ch) -> int {
        const char* p = std::find(std::begin(kB64), std::end(kB64) - 1, ch);
        return p == std::end(kB64) - 1 ? -1 : static_cast<int>(p - kB64);
    };
    if (text.size() % 4 != 0) throw ConfigError("base64 payload length is not a multiple of 4");
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::uint32_t chunk = 0;
        int pad = 0;
        for (int j = 0; j < 4; ++j) {
            char ch = text[i + j];
            int v = 0;
            if (ch == '=') {
                ++pad;
            } else {
                v = value(ch);
                if (v < 0 || pad > 0) throw ConfigError("invalid base64 payload");
            }
            chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
        }
        out.push_back(static_cast<std::uint8_t>(chunk >> 16));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((chunk >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(chunk & 0xff));
    }
    return out;
}

std::string config_to_json(const PercolationConfig& config) {
    // Bit i of the bitmap is site i; byte i/8, least significant bit first.
    std::vector<std::uint8_t> bitmap((config.occupied.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < config.occupied.size(); ++i) {
        if (config.occupied[i]) bitmap[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    nlohmann::json j;
    j["d"] = config.box.dimension();
    j["sides"] = config.box.sides();
    j["offset"] = config.box.offsets();
    j["p"] = config.p;
    j["seed"] = config.seed;
    j["occupied"] = base64_encode(bitmap);
    return j.dump();
}

PercolationConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        PercolationConfig cfg;
        auto sides = j.at("sides").get<std::vector<int>>();
        auto offset = j.at("offset").get<std::vector<int>>();
        cfg.box = LatticeBox(j.at("d").get<int>(), sides, offset);
        cfg.p = j.at("p").get<double>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        auto bitmap = base64_decode(j.at("occupied").get<std::string>());
        if (bitmap.size() != (cfg.box.site_count() + 7) / 8) {
            throw ConfigError("occupancy bitmap length does not match the box");
        }
        cfg.occupied.resize(cfg.box.site_count());
        for (std::size_t i = 0; i < cfg.occupied.size(); ++i) {
            cfg.occupied[i] = (bitmap[i / 8] >> (i % 8)) & 1u;
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed percolation config: ") + e.what());
    }
}

}  // namespace ids
