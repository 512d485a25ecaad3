#include "doctest.h"

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hkcli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("hkflow_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_error_path(const json& doc)
{
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "";
}

CommandOptions quiet_to(const fs::path& p)
{
    CommandOptions o;
    o.out_dir = p.string();
    o.quiet = true;
    return o;
}

} // namespace

TEST_CASE("strict schema with error paths")
{
    CHECK(config_error_path(json::parse(R"J({"flow": {"t_ed": 1}})J")) == "$.flow.t_ed");
    CHECK(config_error_path(json::parse(R"J({"bogus": 1})J")) == "$.bogus");
    CHECK(config_error_path(json::parse(R"J({"model": {"name": "power_law", "parameters": {"alpha": 0}}})J")) ==
          "$.model.parameters.alpha");
    CHECK(config_error_path(json::parse(R"J({"domain": {"n_cells": "many"}})J")) == "$.domain.n_cells");
    CHECK(config_error_path(json::parse(R"J({"transport": {"kinds": ["HK", "XY"]}})J")) == "$.transport.kinds[1]");
    CHECK(config_error_path(json::parse(R"J({"initial": {"expression": "1+", "csv": "a"}})J")) ==
          "$.initial.expression");
    CHECK(config_error_path(json::parse(R"J({"verify": {"suite": "everything"}})J")) == "$.verify.suite");
    CHECK(config_error_path(json::parse(R"J({"seed": -3})J")) == "$.seed");
    CHECK(config_error_path(json::parse(R"J({"flow": {"kind": "conic", "mass_recovery": true}})J")) ==
          "$.flow.mass_recovery");
}

TEST_CASE("config round trip")
{
    const auto cfg = parse_config(json::parse(R"J({"domain": {"kind": "interval", "n_cells": 40},
        "model": {"name": "log", "parameters": {"potential": "cos(2*pi*x)"}},
        "transport": {"kinds": ["W2", "HKS"], "n_time": 8}, "seed": 77})J"));
    const auto again = parse_config(to_json(cfg));
    CHECK(to_json(again) == to_json(cfg));
    CHECK(again.domain.n_cells == 40);
    CHECK(again.transport.kinds.size() == 2);
    CHECK(again.seed == 77);
}

TEST_CASE("csv formatting")
{
    CHECK(CsvWriter::format(0.1) == "0.10000000000000001");
    CHECK(CsvWriter::format(1.0) == "1");
    CHECK(std::stod(CsvWriter::format(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(CsvWriter::quote("plain") == "plain");
    CHECK(CsvWriter::quote("a,b") == "\"a,b\"");
    CHECK(CsvWriter::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("equilibrium command")
{
    SUBCASE("power law alpha = 1: m column all ones")
    {
        const auto dir = scratch("eq1");
        RunConfig cfg;
        cfg.domain.n_cells = 32;
        CHECK(cmd_equilibrium(cfg, quiet_to(dir)) == kPass);
        std::ifstream in(dir / "equilibrium.csv");
        std::string line;
        std::getline(in, line);
        CHECK(line == "x,m,f_at_m");
        int rows = 0;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string x, m;
            std::getline(ss, x, ',');
            std::getline(ss, m, ',');
            CHECK(m == "1");
            ++rows;
        }
        CHECK(rows == 32);
        const json s = json::parse(slurp(dir / "summary.json"));
        CHECK(s["c_star"] == 0.0);
    }
    SUBCASE("log model matches exp(-V)/Z")
    {
        const auto dir = scratch("eq2");
        RunConfig cfg = parse_config(json::parse(R"J({"model": {"name": "log", "parameters": {"potential": "cos(2*pi*x)"}}})J"));
        CHECK(cmd_equilibrium(cfg, quiet_to(dir)) == kPass);
        std::ifstream in(dir / "equilibrium.csv");
        std::string line;
        std::getline(in, line);
        std::vector<double> xs, ms;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string x, m;
            std::getline(ss, x, ',');
            std::getline(ss, m, ',');
            xs.push_back(std::stod(x));
            ms.push_back(std::stod(m));
        }
        double Z = 0.0;
        for (double x : xs)
            Z += std::exp(-std::cos(2 * M_PI * x)) / xs.size();
        for (std::size_t i = 0; i < xs.size(); ++i)
            CHECK(std::abs(ms[i] - std::exp(-std::cos(2 * M_PI * xs[i])) / Z) <= 1e-8);
    }
}

TEST_CASE("exit codes")
{
    try {
        parse_config(json::parse(R"J({"model": {"name": "power_law", "parameters": {"alpha": 0}}})J"));
        FAIL("expected a config error");
    } catch (const std::exception& e) {
        CHECK(exit_code_for(e) == kConfigError);
    }
    CHECK(exit_code_for(hkflow::ModelError("x")) == kEquilibriumFailure);
    CHECK(exit_code_for(hkflow::NumericError("x")) == kSolverFailure);
    CHECK(exit_code_for(hkflow::TransportNonConvergence("x", {})) == kTransportNonConvergence);
    CHECK(exit_code_for(hkflow::CounterexampleError("x")) == kPropertyFailure);

    // W2 between densities of different mass is rejected before solving.
    RunConfig cfg = parse_config(json::parse(R"J({"domain": {"n_cells": 16},
        "endpoints": {"rho0": {"expression": "1"}, "rho1": {"expression": "2"}},
        "transport": {"kinds": ["W2"]}})J"));
    try {
        cmd_distance(cfg, quiet_to(scratch("d2")));
        FAIL("expected a config error");
    } catch (const std::exception& e) {
        CHECK(exit_code_for(e) == kConfigError);
    }
}

TEST_CASE("distance command: identical endpoints and ordering")
{
    const auto dir = scratch("dist");
    RunConfig cfg = parse_config(json::parse(R"J({"domain": {"n_cells": 16},
        "endpoints": {"rho0": {"expression": "1 + 0.3*cos(2*pi*x)", "mass": 1},
                      "rho1": {"expression": "1 + 0.3*sin(2*pi*x)", "mass": 1}},
        "transport": {"kinds": ["HK", "HKS", "W2"], "n_time": 8, "interpolation": true}})J"));
    CHECK(cmd_distance(cfg, quiet_to(dir)) == kPass);
    const json s = json::parse(slurp(dir / "summary.json"));
    CHECK(s["ordering"]["hk_le_hks"] == true);
    CHECK(s["ordering"]["hks_le_w2"] == true);
    CHECK(fs::exists(dir / "interpolation_HKS.csv"));

    cfg.rho1 = cfg.rho0;
    const auto dir2 = scratch("dist0");
    CHECK(cmd_distance(cfg, quiet_to(dir2)) == kPass);
    for (const auto& r : json::parse(slurp(dir2 / "summary.json"))["results"])
        CHECK(r["distance_sq"].get<double>() <= 1e-6);
}

TEST_CASE("simulate command writes trajectory, snapshots and summary")
{
    const auto dir = scratch("sim");
    RunConfig cfg = parse_config(json::parse(R"J({"domain": {"n_cells": 32},
        "flow": {"kind": "spherical", "t_end": 0.2, "snapshot_every": 0.01, "mass_recovery": true, "initial_mass": 2},
        "initial": {"expression": "1 + 0.5*cos(2*pi*x)", "mass": 1}})J"));
    CHECK(cmd_simulate(cfg, quiet_to(dir)) == kPass);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "snapshots" / "snapshot_00000.csv"));
    CHECK(fs::exists(dir / "mass.csv"));
    const json s = json::parse(slurp(dir / "summary.json"));
    CHECK(s["max_mass_drift"].get<double>() <= 1e-12);
    CHECK(s["max_principle"]["pass"] == true);
    CHECK(s["mass_recovery"]["l1_relative_difference"].get<double>() <= 0.02);
}

TEST_CASE("verify output is byte-identical across runs")
{
    RunConfig cfg = parse_config(json::parse(R"J({"verify": {"suite": "talagrand", "talagrand_members": 3,
        "transport_cells": 12}, "transport": {"n_time": 8}, "seed": 5})J"));
    const auto a = scratch("det_a"), b = scratch("det_b");
    CommandOptions oa = quiet_to(a), ob = quiet_to(b);
    ob.jobs = 3;
    cmd_verify(cfg, oa);
    cmd_verify(cfg, ob);
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file())
            continue;
        const auto rel = fs::relative(e.path(), a);
        CHECK(slurp(e.path()) == slurp(b / rel));
        ++files;
    }
    CHECK(files > 3);
}
