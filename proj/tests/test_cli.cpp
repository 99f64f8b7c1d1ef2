#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "experiment.hpp"
#include "ids/errors.hpp"
#include "ids/parallel.hpp"
#include "plot.hpp"
#include "schema.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("idsctl_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json small_chain() {
    return json{{"schema_version", 1},
                {"model", {{"kind", "percolation-adjacency"}, {"dimension", 1}, {"p", 1.0}}},
                {"base_seed", 1},
                {"folner", {{"schedule", {100, 200}}}},
                {"realizations", 1},
                {"lambda_grid", {{"lo", -2.5}, {"hi", 2.5}, {"points", 51}}}};
}

json small_percolation() {
    return json{{"schema_version", 1},
                {"model", {{"kind", "percolation-adjacency"}, {"dimension", 2}, {"p", 0.6}}},
                {"base_seed", 5},
                {"folner", {{"schedule", {6, 12}}}},
                {"realizations", 12},
                {"lambda_grid", {{"lo", -4}, {"hi", 4}, {"points", 64}}}};
}

}  // namespace

TEST_CASE("schema diagnostics name the field") {
    auto doc = small_chain();
    doc["model"]["p"] = 1.5;
    doc["extra"] = true;
    auto issues = idsctl::schema_violations(idsctl::config_schema(), doc);
    REQUIRE(issues.size() == 2);
    bool p_named = false, extra_named = false;
    for (const auto& s : issues) {
        p_named = p_named || s.rfind("$.model.p:", 0) == 0;
        extra_named = extra_named || s.rfind("$.extra:", 0) == 0;
    }
    CHECK(p_named);
    CHECK(extra_named);

    try {
        idsctl::parse_config(doc);
        FAIL("expected a config error");
    } catch (const ids::ConfigError& e) {
        CHECK(std::string(e.what()).find("$.model.p") != std::string::npos);
    }

    auto wrong_type = small_chain();
    wrong_type["realizations"] = "ten";
    CHECK_FALSE(idsctl::schema_violations(idsctl::config_schema(), wrong_type).empty());
    auto missing = small_chain();
    missing.erase("model");
    CHECK_FALSE(idsctl::schema_violations(idsctl::config_schema(), missing).empty());
    CHECK(idsctl::schema_violations(idsctl::config_schema(), small_chain()).empty());
}

TEST_CASE("shipped configs validate") {
    for (const auto& entry : fs::directory_iterator(IDS_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(idsctl::load_config(entry.path()));
    }
}

TEST_CASE("hash primitives") {
    CHECK(idsctl::hex64(idsctl::fnv1a64("")) == "cbf29ce484222325");
    CHECK(idsctl::hex64(idsctl::fnv1a64("a")) == "af63dc4c8601ec8c");
    auto a = idsctl::parse_config(small_chain());
    auto b_doc = small_chain();
    b_doc["base_seed"] = 2;
    CHECK(idsctl::config_hash(a) != idsctl::config_hash(idsctl::parse_config(b_doc)));
}

TEST_CASE("ids on the free chain reads one half at zero") {
    auto dir = scratch("ids");
    auto cfg = idsctl::parse_config(small_chain());
    CHECK(idsctl::run_subcommand("ids", cfg, {dir}) == idsctl::exit_pass);
    auto table = idsctl::parse_csv(read_text(dir / "ids.csv"));
    CHECK(table.config_hash == idsctl::config_hash(cfg));
    REQUIRE(table.header.size() == 4);
    CHECK(table.header[0] == "lambda");
    bool found = false;
    for (const auto& row : table.rows) {
        if (row[0] == "0" && row[3] == "200") {
            CHECK(row[1] == "0.5");
            CHECK(row[2] == "0");
            found = true;
        }
    }
    CHECK(found);
    auto manifest = read_json(dir / "manifest.json");
    CHECK(manifest["artifact_version"] == idsctl::kArtifactVersion);
    CHECK(manifest["config_hash"] == idsctl::config_hash(cfg));
    for (const auto& o : manifest["outputs"]) {
        const std::string text = read_text(dir / o["file"].get<std::string>());
        CHECK(text.find(idsctl::config_hash(cfg)) != std::string::npos);
    }
}

TEST_CASE("json table format") {
    auto dir = scratch("json");
    CHECK(idsctl::run_subcommand("ids", idsctl::parse_config(small_chain()), {dir, idsctl::TableFormat::json}) == 0);
    auto doc = read_json(dir / "ids.json");
    CHECK(doc.contains("config_hash"));
    CHECK(doc["columns"][0] == "lambda");
}

TEST_CASE("check on an empty model passes") {
    auto dir = scratch("empty");
    auto cfg = idsctl::load_config(fs::path(IDS_CONFIG_DIR) / "empty_model.json");
    CHECK(idsctl::run_subcommand("check", cfg, {dir}) == idsctl::exit_pass);
    auto report = read_json(dir / "check_report.json");
    CHECK(report["trace_formula"]["sup_gap"] == 0.0);
    CHECK(report["laplace_route"]["max_gap"] == 0.0);
}

TEST_CASE("failed checks exit with status 2") {
    auto doc = small_percolation();
    doc["dos"] = {{"box", 2}, {"padding", 2}, {"realizations", 4}, {"padding_check", "off"}};
    doc["checks"] = {{"trace_tolerance", 1e-9}};
    auto dir = scratch("failing");
    CHECK(idsctl::run_subcommand("check", idsctl::parse_config(doc), {dir}) == idsctl::exit_failed_check);
}

TEST_CASE("replay is identical across worker counts") {
    auto dir = scratch("replay");
    ids::set_worker_count(1);
    auto cfg = idsctl::parse_config(small_percolation());
    REQUIRE(idsctl::run_subcommand("ids", cfg, {dir / "run"}) == 0);
    ids::set_worker_count(4);
    CHECK(idsctl::replay(dir / "run" / "manifest.json", dir / "again") == idsctl::exit_pass);
    ids::set_worker_count(1);
    CHECK(read_text(dir / "run" / "ids.csv") == read_text(dir / "again" / "ids.csv"));
    CHECK(read_json(dir / "again" / "replay.json")["verdict"] == "identical");
}

TEST_CASE("replay of an edited manifest") {
    auto dir = scratch("edited");
    auto cfg = idsctl::parse_config(small_percolation());
    REQUIRE(idsctl::run_subcommand("ids", cfg, {dir / "run"}) == 0);
    auto manifest = read_json(dir / "run" / "manifest.json");

    auto altered = manifest;
    altered["config"]["base_seed"] = 6;
    std::ofstream(dir / "altered.json") << altered.dump();
    fs::copy(dir / "run" / "ids.csv", dir / "ids.csv");
    fs::copy(dir / "run" / "ids_report.json", dir / "ids_report.json");
    CHECK(idsctl::replay(dir / "altered.json", dir / "altered_out") == idsctl::exit_pass);
    CHECK(read_json(dir / "altered_out" / "replay.json")["verdict"] == "expected divergence");

    auto old = manifest;
    old["artifact_version"] = "0.9.0";
    std::ofstream(dir / "run" / "old.json") << old.dump();
    CHECK(idsctl::replay(dir / "run" / "old.json", dir / "old_out") == idsctl::exit_error);
}

TEST_CASE("tampered artifacts are detected") {
    auto dir = scratch("tamper");
    REQUIRE(idsctl::run_subcommand("ids", idsctl::parse_config(small_chain()), {dir / "run"}) == 0);
    std::string text = read_text(dir / "run" / "ids.csv");
    text.replace(text.find("config_hash=") + 12, 4, "0000");
    std::ofstream(dir / "run" / "ids.csv", std::ios::binary) << text;
    CHECK(idsctl::replay(dir / "run" / "manifest.json", dir / "again") == idsctl::exit_failed_check);
}

TEST_CASE("plots are drawn from CSV alone") {
    const std::string csv = "# config_hash=00000000000000aa\nlambda,value,std,scale\n0,0,0,4\n1,0.5,0,4\n0,0,0,8\n1,0.4,0,8\n";
    auto table = idsctl::parse_csv(csv);
    CHECK(table.config_hash == "00000000000000aa");
    CHECK(table.rows.size() == 4);
    auto svg = idsctl::render_svg({{"ids.csv", table}});
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("config_hash=00000000000000aa") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg == idsctl::render_svg({{"ids.csv", table}}));
}

TEST_CASE("delone subcommand exports operator and certificate") {
    auto dir = scratch("delone");
    auto cfg = idsctl::load_config(fs::path(IDS_CONFIG_DIR) / "fibonacci.json");
    CHECK(idsctl::run_subcommand("delone", cfg, {dir}) == idsctl::exit_pass);
    auto report = read_json(dir / "delone_report.json");
    CHECK(report["r_packing"].get<double>() == doctest::Approx(1.0));
    CHECK(fs::exists(dir / "points.csv"));
    CHECK(fs::exists(dir / "operator.txt"));
}

TEST_CASE("idsctl exit codes") {
    auto dir = scratch("binary");
    auto bad = small_chain();
    bad["model"]["p"] = 1.5;
    std::ofstream(dir / "bad.json") << bad.dump();
    const std::string exe = IDSCTL_PATH;
    auto run = [&](const std::string& args) {
        int status = std::system((exe + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("ids --config " + (dir / "bad.json").string() + " --out " + (dir / "o").string()) == 1);
    CHECK(read_text(dir / "log.txt").find("$.model.p") != std::string::npos);
    CHECK(run("check --config " + (fs::path(IDS_CONFIG_DIR) / "empty_model.json").string() + " --out " + (dir / "e").string()) == 0);
    CHECK(run("ids --config " + (dir / "missing.json").string()) == 1);
}
