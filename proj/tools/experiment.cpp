#include "experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ids/animals.hpp"
#include "ids/delone.hpp"
#include "ids/errors.hpp"
#include "ids/parallel.hpp"
#include "ids/spectra.hpp"
#include "schema.hpp"

namespace idsctl {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<double> ExperimentConfig::grid() const {
    if (lambda_grid) return ids::linspace(lambda_grid->lo, lambda_grid->hi, lambda_grid->points);
    return ids::default_lambda_grid(model);
}

ids::FolnerSequence ExperimentConfig::folner() const { return ids::folner_boxes(model.dimension, schedule, aspect); }

namespace {

std::string join(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += (out.empty() ? "" : "\n") + l;
    return out;
}

}  // namespace

ExperimentConfig parse_config(const json& document) {
    auto problems = schema_violations(config_schema(), document);
    if (!problems.empty()) throw ids::ConfigError("invalid configuration:\n" + join(problems));

    ExperimentConfig c;
    c.source = document;
    const json& m = document.at("model");
    c.model.model = ids::model_kind_from_string(m.at("kind").get<std::string>());
    c.model.dimension = m.at("dimension").get<int>();
    const bool percolation = c.model.model == ids::ModelKind::percolation_adjacency ||
                             c.model.model == ids::ModelKind::percolation_laplacian;
    if (m.contains("p")) {
        c.model.p = m["p"].get<double>();
    } else if (percolation) {
        problems.push_back("$.model.p: required for percolation models");
    }
    if (m.contains("potential")) {
        c.model.potential_low = m["potential"][0].get<double>();
        c.model.potential_high = m["potential"][1].get<double>();
        if (c.model.potential_low > c.model.potential_high) {
            problems.push_back("$.model.potential: lower bound exceeds upper bound");
        }
    }
    c.model.hopping = m.value("hopping", 1.0);
    c.model.amplitude = m.value("amplitude", 0.2);
    if (m.contains("fundamental_domain")) c.model.fundamental_domain = m["fundamental_domain"].get<std::vector<int>>();
    c.model.base_seed = document.value("base_seed", std::uint64_t{0});
    if (problems.empty()) {
        try {
            c.model.validate();
        } catch (const std::exception& e) {
            problems.push_back(std::string("$.model: ") + e.what());
        }
    }

    if (document.contains("folner")) {
        c.schedule = document["folner"]["schedule"].get<std::vector<int>>();
        if (document["folner"].contains("aspect")) c.aspect = document["folner"]["aspect"].get<std::vector<int>>();
        if (problems.empty()) {
            try {
                (void)c.folner();
            } catch (const std::exception& e) {
                problems.push_back(std::string("$.folner: ") + e.what());
            }
        }
    }
    c.realizations = document.value("realizations", std::size_t{1});
    c.normalization =
        document.value("normalization", std::string("volume")) == "volume" ? ids::Normalization::volume
                                                                            : ids::Normalization::occupied;
    if (document.contains("lambda_grid")) {
        const json& g = document["lambda_grid"];
        c.lambda_grid = GridSpec{g["lo"].get<double>(), g["hi"].get<double>(), g["points"].get<std::size_t>()};
        if (!(c.lambda_grid->lo < c.lambda_grid->hi)) problems.push_back("$.lambda_grid: lo must be below hi");
    }
    if (document.contains("t_grid")) c.t_grid = document["t_grid"].get<std::vector<double>>();
    if (document.contains("dos")) {
        const json& d = document["dos"];
        DosSpec s;
        s.box = d["box"].get<int>();
        s.padding = d["padding"].get<int>();
        s.realizations = d.value("realizations", c.realizations);
        s.check = d.value("padding_check", std::string("automatic")) == "off" ? ids::PaddingCheck::off
                                                                              : ids::PaddingCheck::automatic;
        c.dos = s;
    }
    if (document.contains("checks")) {
        const json& k = document["checks"];
        c.trace_tolerance = k.value("trace_tolerance", c.trace_tolerance);
        c.laplace_tolerance = k.value("laplace_tolerance", c.laplace_tolerance);
        c.continuity.jump_mass_floor = k.value("jump_mass_floor", c.continuity.jump_mass_floor);
        c.continuity.exclusion_pitches = k.value("exclusion_pitches", c.continuity.exclusion_pitches);
        if (k.contains("boundary")) {
            const json& b = k["boundary"];
            c.boundary = BoundarySpec{b["t"].get<double>(), b["padding"].get<int>(),
                                      b.value("realizations", std::size_t{1}), b.value("min_ratio", 1.0)};
        }
        if (k.contains("intervals")) {
            for (std::size_t i = 0; i < k["intervals"].size(); ++i) {
                double a = k["intervals"][i][0].get<double>(), b = k["intervals"][i][1].get<double>();
                if (!(a < b)) problems.push_back("$.checks.intervals[" + std::to_string(i) + "]: needs a < b");
                c.intervals.emplace_back(a, b);
            }
        }
        c.constancy = k.value("constancy", false);
    }
    if (document.contains("atoms")) {
        c.s_max = document["atoms"].value("s_max", c.s_max);
        c.atoms_tolerance = document["atoms"].value("tolerance", c.atoms_tolerance);
    }
    if (document.contains("delone")) {
        const json& d = document["delone"];
        DeloneSpec s;
        s.kind = d["kind"].get<std::string>();
        s.length = d.value("length", s.length);
        s.phase = d.value("phase", s.phase);
        s.side = d.value("side", s.side);
        s.amplitude = d.value("amplitude", s.amplitude);
        s.cell_mode = d.value("cell_mode", std::string("drop-boundary")) == "keep-boundary"
                          ? ids::CellMode::keep_boundary
                          : ids::CellMode::drop_boundary;
        c.delone = s;
    }
    c.output = document.value("output", c.output);
    if (!problems.empty()) throw ids::ConfigError("invalid configuration:\n" + join(problems));
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ids::ConfigError("cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ids::ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    auto [end, ec] = std::to_chars(buf, buf + 16, value, 16);
    std::string s(buf, end);
    return std::string(16 - s.size(), '0') + s;
}

std::string config_hash(const ExperimentConfig& config) { return hex64(fnv1a64(config.source.dump())); }

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::string cell(const json& v) {
    if (v.is_number_float()) return num(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

class Artifacts {
public:
    Artifacts(fs::path dir, std::string hash, TableFormat format)
        : dir_(std::move(dir)), hash_(std::move(hash)), format_(format) {
        fs::create_directories(dir_);
    }

    void table(const std::string& stem, const Table& t) {
        std::ostringstream os;
        if (format_ == TableFormat::csv) {
            os << "# config_hash=" << hash_ << '\n';
            for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
            os << '\n';
            for (const auto& row : t.rows) {
                for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << cell(row[k]);
                os << '\n';
            }
            write(stem + ".csv", os.str());
        } else {
            json j{{"config_hash", hash_}, {"columns", t.columns}, {"rows", t.rows}};
            write(stem + ".json", j.dump(1) + "\n");
        }
    }

    void report(const std::string& stem, json j) {
        j["config_hash"] = hash_;
        write(stem + ".json", j.dump(2) + "\n");
    }

    void text(const std::string& name, const std::string& body) {
        write(name, "# config_hash=" + hash_ + "\n" + body);
    }

    const json& outputs() const { return outputs_; }
    const fs::path& dir() const { return dir_; }

private:
    void write(const std::string& name, const std::string& bytes) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw ids::ConfigError("cannot write " + (dir_ / name).string());
        out << bytes;
        outputs_.push_back({{"file", name}, {"fnv1a64", hex64(fnv1a64(bytes))}});
    }

    fs::path dir_;
    std::string hash_;
    TableFormat format_;
    json outputs_ = json::array();
};

void require(bool present, const std::string& field, const std::string& subcommand) {
    if (!present) throw ids::ConfigError(field + ": required by the " + subcommand + " subcommand");
}

Table ids_table(const ids::IdsRun& run, const ExperimentConfig& c) {
    Table t{{"lambda", "value", "std", "scale"}, {}};
    for (std::size_t n = 0; n < run.scales.size(); ++n) {
        for (std::size_t j = 0; j < run.lambda_grid.size(); ++j) {
            t.rows.push_back({run.lambda_grid[j], run.scales[n].mean[j], run.scales[n].std[j], c.schedule[n]});
        }
    }
    return t;
}

Table dos_table(const ids::DosEstimate& est) {
    Table t{{"lambda", "value", "std", "scale"}, {}};
    for (std::size_t j = 0; j < est.lambda_grid.size(); ++j) {
        t.rows.push_back({est.lambda_grid[j], est.values[j], est.std_errors[j], est.box.side(0)});
    }
    return t;
}

ids::IdsRun run_ids(const ExperimentConfig& c) {
    return ids::empirical_ids(c.model, c.folner(), c.realizations, c.normalization, c.grid());
}

ids::DosEstimate run_dos(const ExperimentConfig& c) {
    return ids::abstract_dos(c.model, c.grid(), c.dos->padding, ids::LatticeBox::cube(c.model.dimension, c.dos->box),
                             c.dos->realizations, c.dos->check);
}

json dos_summary(const ids::DosEstimate& est) {
    const double d = static_cast<double>(est.spec.domain_size());
    std::vector<double> tops;
    for (const auto& f : est.per_realization) tops.push_back(f.total());
    double mean = 0.0, ss = 0.0;
    for (double x : tops) mean += x;
    mean /= static_cast<double>(tops.size());
    for (double x : tops) ss += (x - mean) * (x - mean);
    const double se = tops.size() > 1 ? std::sqrt(ss / static_cast<double>(tops.size() - 1) / tops.size()) : 0.0;
    return {{"tau_identity", mean},
            {"tau_identity_std_error", se},
            {"tau_identity_per_domain_site", mean / d},
            {"padding", est.padding},
            {"padding_check_performed", est.padding_check_performed},
            {"padding_too_small", est.padding_too_small},
            {"padding_shift", est.padding_shift},
            {"realizations", est.realizations}};
}

int cmd_ids(const ExperimentConfig& c, Artifacts& out) {
    require(!c.schedule.empty(), "$.folner", "ids");
    auto run = run_ids(c);
    out.table("ids", ids_table(run, c));
    json report{{"normalization", ids::to_string(c.normalization)}, {"realizations", c.realizations}};
    json scales = json::array();
    for (std::size_t n = 0; n < run.scales.size(); ++n) {
        scales.push_back({{"side", c.schedule[n]},
                          {"sites", run.scales[n].box.site_count()},
                          {"mean_total", run.scales[n].mean_distribution().total()}});
    }
    report["scales"] = scales;
    if (c.realizations >= 20) {
        auto sa = ids::self_averaging_report(run);
        Table t{{"lambda", "scale", "std", "ratio_to_previous"}, {}};
        for (std::size_t n = 0; n < sa.std.size(); ++n) {
            for (std::size_t j = 0; j < sa.lambda.size(); ++j) {
                double ratio = n == 0 ? std::nan("") : sa.ratio[n - 1][j];
                t.rows.push_back({sa.lambda[j], c.schedule[n], sa.std[n][j], ratio});
            }
        }
        out.table("self_averaging", t);
    }
    out.report("ids_report", report);
    std::cout << "ids: " << run.scales.size() << " scales x " << c.realizations << " realizations\n";
    return exit_pass;
}

int cmd_dos(const ExperimentConfig& c, Artifacts& out) {
    require(c.dos.has_value(), "$.dos", "dos");
    auto est = run_dos(c);
    out.table("dos", dos_table(est));
    json report = dos_summary(est);
    report["pass"] = !est.padding_too_small;
    out.report("dos_report", report);
    std::cout << "dos: tau(Id) = " << num(report["tau_identity"].get<double>()) << " +- "
              << num(report["tau_identity_std_error"].get<double>()) << '\n';
    if (est.padding_too_small) {
        std::cout << "dos: padding too small, doubling it moved the estimate by " << num(est.padding_shift) << '\n';
        return exit_failed_check;
    }
    return exit_pass;
}

int cmd_check(const ExperimentConfig& c, Artifacts& out) {
    require(!c.schedule.empty(), "$.folner", "check");
    auto run = run_ids(c);
    out.table("ids", ids_table(run, c));
    json report = json::object();
    bool pass = true;

    if (c.dos) {
        auto est = run_dos(c);
        out.table("dos", dos_table(est));
        report["dos"] = dos_summary(est);
        auto gap = ids::trace_formula_check(run, est, c.grid(), c.trace_tolerance, c.continuity);
        Table t{{"lambda", "gap", "std_error", "admitted"}, {}};
        for (std::size_t j = 0; j < gap.lambda.size(); ++j) {
            t.rows.push_back({gap.lambda[j], gap.gap[j], gap.std_error[j], static_cast<bool>(gap.admitted[j])});
        }
        out.table("trace_gap", t);
        report["trace_formula"] = {{"sup_gap", gap.sup_gap},
                                   {"argmax", gap.argmax},
                                   {"tolerance", gap.tolerance},
                                   {"pass", gap.pass}};
        pass = pass && gap.pass;

        auto lap = ids::laplace_route_check(run, est, c.t_grid, c.laplace_tolerance);
        Table l{{"t", "ids_side", "dos_side", "std_error"}, {}};
        for (std::size_t k = 0; k < lap.t.size(); ++k) {
            l.rows.push_back({lap.t[k], lap.ids_side[k], lap.dos_side[k], lap.std_error[k]});
        }
        out.table("laplace", l);
        report["laplace_route"] = {{"max_gap", lap.max_gap},
                                   {"shift", lap.shift},
                                   {"tolerance", lap.tolerance},
                                   {"pass", lap.pass}};
        pass = pass && lap.pass;
    }

    if (c.boundary) {
        auto b = ids::boundary_independence(c.model, c.folner(), c.boundary->t, c.boundary->realizations,
                                            c.boundary->padding);
        Table t{{"scale", "sites", "deviation"}, {}};
        for (std::size_t n = 0; n < b.deviation.size(); ++n) t.rows.push_back({c.schedule[n], b.volumes[n], b.deviation[n]});
        out.table("boundary", t);
        bool ok = b.decreasing;
        for (double r : b.ratio) ok = ok && r >= c.boundary->min_ratio;
        report["boundary_independence"] = {
            {"deviation", b.deviation}, {"ratio", b.ratio}, {"min_ratio", c.boundary->min_ratio}, {"pass", ok}};
        pass = pass && ok;
    }

    if (!c.intervals.empty()) {
        Table t{{"a", "b", "scale", "mean_count", "classification"}, {}};
        json list = json::array();
        bool ok = true;
        for (auto [a, b] : c.intervals) {
            auto d = ids::dichotomy_check(run, a, b);
            for (std::size_t n = 0; n < d.volumes.size(); ++n) {
                t.rows.push_back({a, b, c.schedule[n], d.mean_counts[n], ids::to_string(d.classification)});
            }
            list.push_back({{"a", a},
                            {"b", b},
                            {"slope", d.slope},
                            {"slope_std_error", d.slope_std_error},
                            {"classification", ids::to_string(d.classification)}});
            ok = ok && d.classification != ids::SpectralClass::bounded_nonzero;
        }
        out.table("dichotomy", t);
        report["dichotomy"] = {{"intervals", list}, {"pass", ok}};
        pass = pass && ok;
    }

    if (c.constancy) {
        auto k = ids::spectrum_constancy_report(run);
        report["spectrum_constancy"] = {{"max_hausdorff", k.max_hausdorff},
                                        {"union_min", k.union_min},
                                        {"union_max", k.union_max},
                                        {"support_min", k.support_min},
                                        {"support_max", k.support_max},
                                        {"grid_pitch", k.grid_pitch},
                                        {"hull_gap", k.hull_gap},
                                        {"pass", k.pass}};
        pass = pass && k.pass;
    }

    report["pass"] = pass;
    out.report("check_report", report);
    for (auto it = report.begin(); it != report.end(); ++it) {
        if (it->is_object() && it->contains("pass")) {
            std::cout << "check " << it.key() << ": " << ((*it)["pass"].get<bool>() ? "pass" : "FAIL") << '\n';
        }
    }
    return pass ? exit_pass : exit_failed_check;
}

int cmd_atoms(const ExperimentConfig& c, Artifacts& out) {
    require(!c.schedule.empty(), "$.folner", "atoms");
    if (c.model.model != ids::ModelKind::percolation_adjacency) {
        throw ids::ConfigError("$.model.kind: the atoms subcommand needs percolation-adjacency");
    }
    auto oracle = ids::cluster_atom_oracle(c.s_max, c.model.p, c.model.dimension);
    auto run = run_ids(c);
    out.table("ids", ids_table(run, c));
    Table a{{"location", "weight"}, {}};
    for (const auto& atom : oracle.atoms.atoms()) a.rows.push_back({atom.location, atom.weight});
    out.table("oracle_atoms", a);
    Table s{{"sites", "placements", "perimeter", "density"}, {}};
    for (const auto& shape : oracle.shapes) {
        s.rows.push_back({shape.sites, shape.placements, shape.perimeter, shape.density(c.model.p)});
    }
    out.table("shapes", s);

    auto rep = ids::ids_jump_compare(run, oracle, c.atoms_tolerance);
    Table j{{"location", "oracle_weight", "empirical", "std_error", "resolved", "pass"}, {}};
    for (const auto& m : rep.matches) {
        j.rows.push_back({m.location, m.oracle_weight, m.empirical, m.std_error, m.resolved, m.pass});
    }
    out.table("jumps", j);
    json unmatched = json::array();
    for (const auto& u : rep.unmatched) unmatched.push_back({{"location", u.location}, {"weight", u.weight}});
    out.report("atoms_report", {{"s_max", oracle.s_max},
                                {"p", oracle.p},
                                {"shapes", oracle.shapes.size()},
                                {"site_budget", oracle.site_budget()},
                                {"unmatched", unmatched},
                                {"tolerance", rep.tolerance},
                                {"pass", rep.pass}});
    std::cout << "atoms: " << oracle.shapes.size() << " cluster shapes, comparison " << (rep.pass ? "pass" : "FAIL")
              << '\n';
    return rep.pass ? exit_pass : exit_failed_check;
}

int cmd_delone(const ExperimentConfig& c, Artifacts& out) {
    require(c.delone.has_value(), "$.delone", "delone");
    const DeloneSpec& d = *c.delone;
    ids::DeloneSet set = d.kind == "fibonacci"
                             ? ids::fibonacci_chain(d.length, d.phase)
                             : ids::perturbed_lattice(ids::LatticeBox::cube(2, d.side), d.amplitude,
                                                      c.model.seed(0));
    auto adj = ids::voronoi_adjacency(set);
    auto op = ids::delone_operator(adj, d.cell_mode);
    out.text("points.csv", ids::delone_to_csv(set));
    out.text("operator.txt", op.to_coordinate_text());
    std::size_t interior = 0, degree = 0;
    auto nb = adj.neighbours();
    for (std::size_t i = 0; i < nb.size(); ++i) {
        if (!adj.boundary[i]) {
            ++interior;
            degree += nb[i].size();
        }
    }
    out.report("delone_report",
               {{"points", set.points.size()},
                {"r_packing", set.r_packing},
                {"R_covering", set.R_covering},
                {"density", ids::point_density(set, set.window)},
                {"interior_points", interior},
                {"interior_mean_degree", interior ? static_cast<double>(degree) / interior : 0.0},
                {"cocircular_quadruples", adj.cocircular.size()},
                {"operator_dimension", op.dimension()},
                {"pass", true}});
    std::cout << "delone: " << set.points.size() << " points, r = " << num(set.r_packing)
              << ", R = " << num(set.R_covering) << '\n';
    return exit_pass;
}

}  // namespace

int run_subcommand(const std::string& name, const ExperimentConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    Artifacts out(options.out, config_hash(config), options.format);
    int status = exit_error;
    if (name == "ids") {
        status = cmd_ids(config, out);
    } else if (name == "dos") {
        status = cmd_dos(config, out);
    } else if (name == "check") {
        status = cmd_check(config, out);
    } else if (name == "atoms") {
        status = cmd_atoms(config, out);
    } else if (name == "delone") {
        status = cmd_delone(config, out);
    } else {
        throw ids::ConfigError("unknown subcommand '" + name + "'");
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::size_t count = config.realizations;
    if (config.dos) count = std::max(count, config.dos->realizations);
    std::vector<std::uint64_t> seeds;
    for (std::size_t r = 0; r < count; ++r) seeds.push_back(config.model.seed(r));
    json manifest{{"artifact_version", kArtifactVersion},
                  {"subcommand", name},
                  {"config", config.source},
                  {"config_hash", config_hash(config)},
                  {"format", options.format == TableFormat::csv ? "csv" : "json"},
                  {"seeds", seeds},
                  {"workers", ids::worker_count()},
                  {"eigensolver", ids::eigensolver_backend()},
                  {"exit_status", status},
                  {"outputs", out.outputs()},
                  {"timings", {{"total_seconds", seconds}}}};
    std::ofstream(options.out / "manifest.json") << manifest.dump(2) << '\n';
    return status;
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ids::ConfigError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Hash embedded in an artifact: first-line comment or the report field.
std::string embedded_hash(const fs::path& path) {
    const std::string body = read_file(path);
    const std::string tag = "# config_hash=";
    if (body.rfind(tag, 0) == 0) return body.substr(tag.size(), body.find('\n') - tag.size());
    try {
        auto j = json::parse(body);
        return j.value("config_hash", std::string());
    } catch (const json::exception&) {
        return {};
    }
}

}  // namespace

int replay(const fs::path& manifest_path, const fs::path& out) {
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw ids::ConfigError("manifest " + manifest_path.string() + " is not valid JSON: " + e.what());
    }
    const std::string version = manifest.value("artifact_version", std::string("?"));
    if (version != kArtifactVersion) {
        std::cerr << "replay: manifest was written by artifact version " << version << ", this is " << kArtifactVersion
                  << "; outputs are only reproducible under the same version\n";
        return exit_error;
    }
    ExperimentConfig config = parse_config(manifest.at("config"));
    const std::string recorded = manifest.at("config_hash").get<std::string>();
    const std::string current = config_hash(config);
    const bool altered = recorded != current;

    const fs::path origin = manifest_path.parent_path();
    std::size_t tampered = 0;
    for (const json& o : manifest.at("outputs")) {
        const fs::path file = origin / o.at("file").get<std::string>();
        if (fs::exists(file) && embedded_hash(file) != recorded) {
            std::cout << "replay: " << file.string() << " does not carry config hash " << recorded << '\n';
            ++tampered;
        }
    }

    RunOptions options{out, manifest.value("format", std::string("csv")) == "json" ? TableFormat::json : TableFormat::csv};
    const int status = run_subcommand(manifest.at("subcommand").get<std::string>(), config, options);
    if (status == exit_error) return exit_error;
    const json fresh = json::parse(read_file(out / "manifest.json"));

    std::size_t differing = 0;
    for (const json& o : manifest.at("outputs")) {
        const std::string file = o.at("file").get<std::string>();
        std::string now;
        for (const json& f : fresh.at("outputs")) {
            if (f.at("file") == file) now = f.at("fnv1a64").get<std::string>();
        }
        const bool same = now == o.at("fnv1a64").get<std::string>();
        differing += same ? 0 : 1;
        std::cout << (same ? "identical " : "differs   ") << file << '\n';
    }
    json summary{{"manifest", manifest_path.string()},
                 {"config_altered", altered},
                 {"differing_outputs", differing},
                 {"tampered_inputs", tampered}};
    if (altered) {
        summary["verdict"] = differing > 0 ? "expected divergence" : "config altered without effect";
        std::cout << "replay: config hash " << recorded << " -> " << current << " (manifest edited); "
                  << summary["verdict"].get<std::string>() << '\n';
        std::ofstream(out / "replay.json") << summary.dump(2) << '\n';
        return exit_pass;
    }
    summary["verdict"] = differing == 0 && tampered == 0 ? "identical" : "diverged";
    std::cout << "replay: " << summary["verdict"].get<std::string>() << '\n';
    std::ofstream(out / "replay.json") << summary.dump(2) << '\n';
    return differing == 0 && tampered == 0 ? exit_pass : exit_failed_check;
}

}  // namespace idsctl
