// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "experiment.hpp"
#include "ids/animals.hpp"
#include "ids/delone.hpp"
#include "ids/distribution.hpp"
#include "ids/dos.hpp"
#include "ids/operator.hpp"
#include "ids/parallel.hpp"
#include "ids/spectra.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

idsctl::ExperimentConfig config(const std::string& name) {
    return idsctl::load_config(fs::path(IDS_CONFIG_DIR) / name);
}

ids::IdsRun run_ids(const idsctl::ExperimentConfig& c) {
    return ids::empirical_ids(c.model, c.folner(), c.realizations, c.normalization, c.grid());
}

ids::DosEstimate run_dos(const idsctl::ExperimentConfig& c) {
    return ids::abstract_dos(c.model, c.grid(), c.dos->padding, ids::LatticeBox::cube(c.model.dimension, c.dos->box),
                             c.dos->realizations, c.dos->check);
}

// #{k : 2cos(k pi/(n+1)) < lambda} / n for the path on n sites. Rational
// cosines of rational angles are 0, +-1/2, +-1, so an eigenvalue can equal a
// grid point only at lambda in {0, +-1, +-2}; those ties are decided exactly.
double path_ids(std::size_t n, double lambda) {
    const std::size_t m = n + 1;
    std::size_t count = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        const long double e = 2.0L * std::cos(static_cast<long double>(k) * std::numbers::pi_v<long double> / m);
        bool tie = false;
        if (lambda == 0.0) tie = 2 * k == m;
        if (lambda == 1.0) tie = 3 * k == m;
        if (lambda == -1.0) tie = 3 * k == 2 * m;
        if (!tie && e < lambda) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(n);
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// The percolation run shared by the trace, Laplace, uniqueness and dichotomy criteria.
struct SharedRun {
    idsctl::ExperimentConfig cfg;
    ids::IdsRun ids;
    ids::DosEstimate dos;
    double seconds = 0.0;
};

std::optional<SharedRun> shared;

const SharedRun& shared_run() {
    if (!shared) {
        SharedRun s{config("trace_formula.json"), {}, {}, 0.0};
        const auto start = Clock::now();
        s.ids = run_ids(s.cfg);
        s.dos = run_dos(s.cfg);
        s.seconds = seconds_since(start);
        shared = std::move(s);
    }
    return *shared;
}

Outcome free_chain_exactness() {
    const auto cfg = config("free_chain.json");
    const auto start = Clock::now();
    const auto run = run_ids(cfg);
    const double elapsed = seconds_since(start);
    const std::size_t n = run.largest().box.site_count();
    double worst = 0.0;
    for (std::size_t j = 0; j < run.lambda_grid.size(); ++j) {
        worst = std::max(worst, std::abs(run.largest().mean[j] - path_ids(n, run.lambda_grid[j])));
    }
    return {n == 2000 && worst <= 1e-12 && elapsed <= 60.0,
            fmt("n=%zu, max deviation %.3g over %zu grid points, %.2f s", n, worst, run.lambda_grid.size(), elapsed)};
}

Outcome trace_formula() {
    const auto& s = shared_run();
    const auto rep = ids::trace_formula_check(s.ids, s.dos, s.ids.lambda_grid, s.cfg.trace_tolerance, s.cfg.continuity);
    return {rep.pass && rep.sup_gap <= 0.02 && s.seconds <= 1200.0,
            fmt("sup gap %.4g at lambda=%.4g (tolerance 0.02), %.0f s with %d worker(s)", rep.sup_gap, rep.argmax,
                s.seconds, ids::worker_count())};
}

Outcome tau_identity() {
    Outcome out{true, ""};
    for (const char* name : {"tau_p03.json", "tau_p07.json"}) {
        const auto cfg = config(name);
        const auto est = run_dos(cfg);
        const double d = static_cast<double>(cfg.model.domain_size());
        const double value = est.values.back() / d;
        const double se = est.std_errors.back() / d;
        const bool ok = std::abs(value - cfg.model.p) <= 3.0 * se && se <= 0.01;
        out.pass = out.pass && ok;
        out.detail += fmt("%sp=%.1f: %.4f +- %.4f", out.detail.empty() ? "" : "; ", cfg.model.p, value, se);
    }
    return out;
}

Outcome finite_cluster_jumps() {
    const auto cfg = config("atoms_p03.json");
    const double p = cfg.model.p;
    const auto run = run_ids(cfg);
    const auto oracle = ids::cluster_atom_oracle(cfg.s_max, p);
    const auto rep = ids::ids_jump_compare(run, oracle, cfg.atoms_tolerance);
    const double dimer = ids::cluster_atom_oracle(2, p).weight_at(1.0);
    const double isolated = p * std::pow(1.0 - p, 4);

    auto match_at = [&](double location) -> const ids::JumpMatch* {
        for (const auto& m : rep.matches) {
            if (std::abs(m.location - location) <= 1e-6) return &m;
        }
        return nullptr;
    };
    const auto* zero = match_at(0.0);
    const auto* plus = match_at(1.0);
    const auto* minus = match_at(-1.0);
    if (!zero || !plus || !minus) return {false, "oracle is missing an atom at 0 or +-1"};

    const bool zero_ok = zero->empirical >= isolated - 3.0 * zero->std_error &&
                         zero->empirical <= oracle.weight_at(0.0) + 0.01;
    const bool ones_ok = plus->empirical >= dimer - 3.0 * plus->std_error &&
                         minus->empirical >= dimer - 3.0 * minus->std_error;
    return {zero_ok && ones_ok,
            fmt("jump(0)=%.4f (se %.4f, bounds %.5f..%.4f); jump(+1)=%.4f, jump(-1)=%.4f vs dimer %.4f",
                zero->empirical, zero->std_error, isolated, oracle.weight_at(0.0) + 0.01, plus->empirical,
                minus->empirical, dimer)};
}

Outcome self_averaging() {
    const auto cfg = config("self_averaging.json");
    const auto run = run_ids(cfg);
    const auto rep = ids::self_averaging_report(run, {0.5});
    bool pass = rep.ratio.size() == 2;
    std::string detail = "lambda=0.5, std ratios";
    for (const auto& r : rep.ratio) {
        pass = pass && std::isfinite(r[0]) && std::abs(r[0] - 0.5) <= 0.2;
        detail += fmt(" %.3f", r[0]);
    }
    return {pass, detail};
}

Outcome boundary_independence() {
    const auto cfg = config("boundary_free_chain.json");
    const auto& b = *cfg.boundary;
    const auto rep = ids::boundary_independence(cfg.model, cfg.folner(), b.t, b.realizations, b.padding);
    bool pass = rep.ratio.size() == 2;
    std::string detail = "deviation ratios";
    for (double r : rep.ratio) {
        pass = pass && r >= 1.8;
        detail += fmt(" %.3f", r);
    }
    return {pass, detail};
}

Outcome laplace_route() {
    const auto& s = shared_run();
    const auto rep = ids::laplace_route_check(s.ids, s.dos, {0.5, 1.0, 2.0}, 0.02);
    return {rep.pass && rep.max_gap <= 0.02, fmt("max gap %.3g with shift %.3g", rep.max_gap, rep.shift)};
}

Outcome point_part_mixed() {
    std::vector<ids::DistributionFunction::Jump> lebesgue;
    for (int i = 0; i < 1000; ++i) lebesgue.push_back({(i + 0.5) / 1000.0, 1e-3});
    const auto mixed = ids::DistributionFunction::mixture(
        std::vector<ids::DistributionFunction>{ids::DistributionFunction::from_jumps({{0.0, 1.0}}),
                                               ids::DistributionFunction::from_jumps(lebesgue)},
        std::vector<double>{0.5, 1.0});
    const auto pp = ids::point_part(mixed, 16, 0.005, 0.01);

    // Best single interval of length 0.005: every window starting at a jump.
    const auto loc = mixed.locations();
    double best = 0.0;
    for (std::size_t i = 0; i < loc.size(); ++i) {
        double mass = 0.0;
        for (std::size_t j = i; j < loc.size() && loc[j] - loc[i] <= 0.005; ++j) mass += mixed.weight(j);
        best = std::max(best, mass);
    }
    if (pp.atoms.size() != 1) return {false, fmt("%zu atoms", pp.atoms.size())};
    const double w = pp.atoms.atoms()[0].weight;
    return {w >= 0.5 && w <= 0.506 && std::abs(w - best) <= 1e-12,
            fmt("one atom at %.4f, weight %.6f, exhaustive best %.6f", pp.atoms.atoms()[0].location, w, best)};
}

Outcome uniqueness_shadow() {
    const auto t = ids::linspace(0.1, 5.0, 21);
    struct Pair {
        std::string label;
        ids::DistributionFunction a, b;
        std::vector<double> grid;
        double shift;
    };
    std::vector<Pair> pairs;

    auto free = config("free_chain.json");
    free.schedule = {1000, 2000, 4000};
    const auto chain = run_ids(free);
    const double chain_shift = -free.model.spectral_bounds().first;
    for (std::size_t n = 0; n + 1 < chain.scales.size(); ++n) {
        pairs.push_back({fmt("chain %d/%d", free.schedule[n], free.schedule[n + 1]), chain.scales[n].mean_distribution(),
                         chain.scales[n + 1].mean_distribution(), chain.lambda_grid, chain_shift});
    }
    const auto& s = shared_run();
    const double perc_shift = -s.cfg.model.spectral_bounds().first;
    for (std::size_t n = 0; n + 1 < s.ids.scales.size(); ++n) {
        pairs.push_back({fmt("percolation %d/%d", s.cfg.schedule[n], s.cfg.schedule[n + 1]),
                         s.ids.scales[n].mean_distribution(), s.ids.scales[n + 1].mean_distribution(), s.ids.lambda_grid,
                         perc_shift});
    }

    bool pass = true;
    int premises = 0;
    std::string detail;
    for (const auto& pr : pairs) {
        const double agreement = ids::laplace_agreement(pr.a.shifted(pr.shift), pr.b.shifted(pr.shift), t);
        detail += fmt("%s%s: laplace %.2g", detail.empty() ? "" : "; ", pr.label.c_str(), agreement);
        if (agreement > 1e-4) continue;
        ++premises;
        ids::CdfDistanceOptions opt;
        opt.jump_tolerance = 2.0 * (pr.grid[1] - pr.grid[0]);
        opt.jump_mass_floor = 0.01;
        opt.cluster_width = 1e-8 * std::max(pr.grid.back() - pr.grid.front(), 1.0);
        const auto cdf = ids::cdf_distance(pr.a, pr.b, pr.grid, opt);
        pass = pass && cdf.sup_gap <= 0.01;
        detail += fmt(", cdf %.2g", cdf.sup_gap);
    }
    return {pass && premises > 0, fmt("%d pair(s) meet the Laplace premise; ", premises) + detail};
}

Outcome delone_operator() {
    const auto box = ids::LatticeBox::cube(2, 20);
    const auto square = ids::perturbed_lattice(box, 0.0, 0);
    const auto op = ids::delone_operator(ids::voronoi_adjacency(square), ids::CellMode::keep_boundary);
    const auto lattice = ids::adjacency_operator(ids::sample_percolation(box, 1.0, 0));
    const bool exact = op.dimension() == lattice.dimension() && op.dense() == lattice.dense();

    const auto pcfg = config("perturbed_lattice.json");
    const auto& dl = *pcfg.delone;
    const auto set = ids::perturbed_lattice(ids::LatticeBox::cube(2, dl.side), dl.amplitude, pcfg.model.base_seed);
    const auto adj = ids::voronoi_adjacency(set);
    const auto nb = adj.neighbours();
    double total = 0.0;
    std::size_t interior = 0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
        if (adj.boundary[i]) continue;
        total += static_cast<double>(nb[i].size());
        ++interior;
    }
    const double degree = total / static_cast<double>(interior);

    const auto fcfg = config("fibonacci.json");
    const auto chain = ids::fibonacci_chain(100000, fcfg.delone->phase);
    const double L = 30000.0;
    const double da = ids::point_density(chain, ids::Window{1, {100.0, 0.0}, {100.0 + L, 0.0}});
    const double db = ids::point_density(chain, ids::Window{1, {40000.0, 0.0}, {40000.0 + L, 0.0}});

    return {exact && std::abs(degree - 6.0) <= 0.1 && std::abs(da - db) <= 1e-3,
            fmt("square lattice %s; mean interior degree %.4f over %zu points; Fibonacci densities %.6f / %.6f",
                exact ? "identical" : "differs", degree, interior, da, db)};
}

Outcome dichotomy() {
    const auto& s = shared_run();
    bool pass = !s.cfg.intervals.empty();
    std::string detail;
    for (const auto& [a, b] : s.cfg.intervals) {
        const auto rep = ids::dichotomy_check(s.ids, a, b);
        pass = pass && rep.classification != ids::SpectralClass::bounded_nonzero;
        detail += fmt("%s[%g,%g] %s", detail.empty() ? "" : ", ", a, b, ids::to_string(rep.classification).c_str());
    }
    return {pass, detail};
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "ids_acceptance_replay";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string exe = IDSCTL_PATH;
    auto call = [&](const std::string& args) {
        const std::string cmd = exe + " " + args + " >> " + (root / "log.txt").string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };

    const std::vector<std::pair<std::string, std::string>> runs{{"ids", "free_chain"},
                                                                {"check", "trace_formula"},
                                                                {"dos", "tau_p03"},
                                                                {"dos", "tau_p07"},
                                                                {"atoms", "atoms_p03"}};
    bool pass = true;
    std::size_t compared = 0;
    std::string failures;
    for (const auto& [sub, name] : runs) {
        const fs::path first = root / name;
        const fs::path again = root / (name + "_replay");
        const int made = call("--workers 1 " + sub + " --config " + (fs::path(IDS_CONFIG_DIR) / (name + ".json")).string() +
                              " --out " + first.string());
        if (made == idsctl::exit_error) {
            pass = false;
            failures += " " + name + "(run)";
            continue;
        }
        if (call("--workers 8 replay " + (first / "manifest.json").string() + " --out " + again.string()) != 0) {
            pass = false;
            failures += " " + name + "(replay)";
        }
        for (const auto& entry : fs::directory_iterator(first)) {
            if (entry.path().extension() != ".csv") continue;
            ++compared;
            if (read_text(entry.path()) != read_text(again / entry.path().filename())) {
                pass = false;
                failures += " " + name + "/" + entry.path().filename().string();
            }
        }
    }
    return {pass && compared > 0, fmt("%zu CSV files compared", compared) + (failures.empty() ? "" : ", differing:" + failures)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"free chain exactness", free_chain_exactness},
        {"trace formula", trace_formula},
        {"tau(Id) = p|D|", tau_identity},
        {"finite-cluster jumps", finite_cluster_jumps},
        {"self-averaging", self_averaging},
        {"boundary independence", boundary_independence},
        {"Laplace route", laplace_route},
        {"point part of a mixed measure", point_part_mixed},
        {"Laplace agreement implies cdf agreement", uniqueness_shadow},
        {"Delone Voronoi operator", delone_operator},
        {"dichotomy", dichotomy},
        {"replay determinism", determinism},
    };

    std::cout << "eigensolver backend: " << ids::eigensolver_backend() << '\n' << std::flush;
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
                  << "): " << o.detail << fmt(" [%.1f s]", seconds_since(start)) << '\n'
                  << std::flush;
    }
    std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
