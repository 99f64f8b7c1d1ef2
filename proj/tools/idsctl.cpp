#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "ids/errors.hpp"
#include "ids/parallel.hpp"
#include "ids/spectra.hpp"
#include "plot.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ids::ConfigError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integrated density of states experiments"};
    app.require_subcommand(1);

    int workers = 0;
    std::optional<std::uint64_t> seed_override;
    std::string format = "csv";
    app.add_option("--workers", workers, "Worker threads (default $IDS_WORKERS or 1)")->check(CLI::PositiveNumber);
    app.add_option("--seed-override", seed_override, "Replace base_seed from the config");
    app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));

    std::string config_path, out_dir;
    for (const char* name : {"ids", "dos", "check", "atoms", "delone"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "Output directory (default: the config's output field)");
        sub->fallthrough();
    }
    auto* plot = app.add_subcommand("plot", "Render CSV curves as SVG");
    std::vector<std::string> plot_inputs;
    std::string plot_out, column = "value";
    plot->add_option("--in", plot_inputs, "CSV files")->required();
    plot->add_option("--out", plot_out, "SVG file")->required();
    plot->add_option("--column", column, "Column to draw against the first one");
    auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare outputs");
    std::string manifest;
    replay->add_option("manifest", manifest, "manifest.json of a previous run")->required();
    replay->add_option("--out", out_dir, "Output directory (default: <manifest dir>/replay)");
    replay->fallthrough();
    plot->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return idsctl::exit_error;
    }

    try {
        if (workers > 0) ids::set_worker_count(workers);
        if (ids::eigensolver_backend() == "eigen") {
            std::cerr << "note: the linked LAPACK failed its self-test; using the slower built-in eigensolver "
                         "(for OpenBLAS try OPENBLAS_CORETYPE=Haswell)\n";
        }
        auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "plot") {
            std::vector<idsctl::PlotInput> inputs;
            for (const auto& p : plot_inputs) inputs.push_back({fs::path(p).filename().string(), idsctl::parse_csv(slurp(p))});
            std::ofstream(plot_out) << idsctl::render_svg(inputs, column);
            return idsctl::exit_pass;
        }
        if (name == "replay") {
            fs::path m(manifest);
            fs::path out = out_dir.empty() ? m.parent_path() / "replay" : fs::path(out_dir);
            return idsctl::replay(m, out);
        }
        auto config = idsctl::load_config(config_path);
        if (seed_override) {
            auto doc = config.source;
            doc["base_seed"] = *seed_override;
            config = idsctl::parse_config(doc);
        }
        idsctl::RunOptions options{out_dir.empty() ? fs::path(config.output) : fs::path(out_dir),
                                   format == "json" ? idsctl::TableFormat::json : idsctl::TableFormat::csv};
        return idsctl::run_subcommand(name, config, options);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return idsctl::exit_error;
    }
}
