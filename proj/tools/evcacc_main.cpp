#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "evcacc/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"EV platoon CACC simulator"};
    app.require_subcommand(1);

    evcacc::RunManifest m;
    std::string config, out;
    std::vector<double> headways;

    struct Command {
        const char* name;
        const char* help;
        bool needs_out;
    };
    const Command commands[] = {
        {"simulate", "Run one scenario and write trajectories and a summary", true},
        {"sweep-headway", "Run the scenario at several headway times", true},
        {"compare", "Run the scenario under the proposed and the baseline controller", true},
        {"sysid", "Fit the two-mode first-order model to step-response trials", true},
        {"verify-gains", "Check the gain conditions and print the decay rate", false},
    };
    for (const Command& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        auto* o = sub->add_option("--out", out, "Output directory");
        if (c.needs_out) o->required();
        sub->add_option("--seed", m.seed, "Seed for synthetic noise")->capture_default_str();
        if (std::string(c.name) == "sweep-headway") {
            sub->add_option("--headways", headways, "Headway times [s], overrides the config")->delimiter(',');
        }
        sub->callback([&m, &sub = *sub] { m.command = sub.get_name(); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : evcacc::kExitConfigError;
    }

    m.config_path = config;
    m.output_dir = out;
    for (CLI::App* sub : app.get_subcommands()) {
        if (sub->get_name() == "sweep-headway" && sub->count("--headways") > 0) m.headways = headways;
    }
    return evcacc::run_command(m, std::cout, std::cerr);
}
