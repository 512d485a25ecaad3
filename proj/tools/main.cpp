#include "cli/commands.hpp"
#include "cli/config.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"hkflow: entropy-dissipating flows and Hellinger-Kantorovich distances"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::size_t jobs = 1;
    std::optional<std::uint64_t> seed;
    bool quiet = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration document (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
        sub->add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::Range(1, 1024));
        sub->add_option("--seed", seed, "seed for generated families");
        sub->add_flag("--quiet", quiet, "suppress progress output");
    };
    CLI::App* eq = app.add_subcommand("equilibrium", "normalize the equilibrium density");
    CLI::App* sim = app.add_subcommand("simulate", "run a flow and record diagnostics");
    CLI::App* dist = app.add_subcommand("distance", "dynamic transport distances between two densities");
    CLI::App* ver = app.add_subcommand("verify", "property suites");
    std::string suite;
    ver->add_option("suite", suite, "dissipation|eep|logsobolev|talagrand|ordering|maxprinciple|comparison|all");
    for (CLI::App* sub : {eq, sim, dist, ver})
        add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hkcli::kConfigError;
    }

    try {
        hkcli::RunConfig cfg;
        if (!config_path.empty())
            cfg = hkcli::load_config(config_path);
        if (seed)
            cfg.seed = *seed;
        if (!suite.empty()) {
            nlohmann::json patch = hkcli::to_json(cfg);
            patch["verify"]["suite"] = suite;
            cfg = hkcli::parse_config(patch);
        }
        hkcli::CommandOptions opts;
        opts.out_dir = out_dir.empty() ? cfg.output.directory : out_dir;
        opts.jobs = jobs;
        opts.quiet = quiet;

        if (eq->parsed())
            return hkcli::cmd_equilibrium(cfg, opts);
        if (sim->parsed())
            return hkcli::cmd_simulate(cfg, opts);
        if (dist->parsed())
            return hkcli::cmd_distance(cfg, opts);
        return hkcli::cmd_verify(cfg, opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return hkcli::exit_code_for(e);
    }
}
