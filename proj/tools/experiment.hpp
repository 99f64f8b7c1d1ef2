#pragma once

// Config-driven pipelines behind the idsctl subcommands.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ids/dos.hpp"
#include "ids/ensemble.hpp"
#include "ids/operator.hpp"

namespace idsctl {

inline constexpr const char* kArtifactVersion = "1.0.0";

enum ExitCode { exit_pass = 0, exit_error = 1, exit_failed_check = 2 };

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t points = 0;
};

struct DosSpec {
    int box = 1;
    int padding = 0;
    std::size_t realizations = 1;
    ids::PaddingCheck check = ids::PaddingCheck::automatic;
};

struct BoundarySpec {
    double t = 1.0;
    int padding = 0;
    std::size_t realizations = 1;
    double min_ratio = 1.0;
};

struct DeloneSpec {
    std::string kind;  // "fibonacci" or "perturbed-lattice"
    std::size_t length = 1000;
    double phase = 0.0;
    int side = 30;
    double amplitude = 0.2;
    ids::CellMode cell_mode = ids::CellMode::drop_boundary;
};

struct ExperimentConfig {
    nlohmann::json source;  // the validated document; hashing and replay use it verbatim
    ids::OperatorEnsembleSpec model;
    std::vector<int> schedule;
    std::vector<int> aspect;
    std::size_t realizations = 1;
    ids::Normalization normalization = ids::Normalization::volume;
    std::optional<GridSpec> lambda_grid;
    std::vector<double> t_grid{0.5, 1.0, 2.0};
    std::optional<DosSpec> dos;
    double trace_tolerance = 0.02;
    double laplace_tolerance = 0.02;
    ids::ContinuityOptions continuity;
    std::optional<BoundarySpec> boundary;
    std::vector<std::pair<double, double>> intervals;
    bool constancy = false;
    int s_max = 8;
    double atoms_tolerance = 0.02;
    std::optional<DeloneSpec> delone;
    std::string output = "out";

    std::vector<double> grid() const;
    ids::FolnerSequence folner() const;
};

// Schema check followed by semantic checks; ConfigError lists every problem
// with its field path.
ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);
std::string config_hash(const ExperimentConfig& config);

enum class TableFormat { csv, json };

struct RunOptions {
    std::filesystem::path out;
    TableFormat format = TableFormat::csv;
};

// Runs ids, dos, check, atoms or delone and writes artifacts plus
// manifest.json into options.out. Returns an ExitCode.
int run_subcommand(const std::string& name, const ExperimentConfig& config, const RunOptions& options);

// Re-runs the manifest's subcommand into `out` and compares output hashes.
int replay(const std::filesystem::path& manifest, const std::filesystem::path& out);

}  // namespace idsctl
