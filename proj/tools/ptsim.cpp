// ptsim <sweep|threshold|crossing|validate|schur> --config <path> [overrides]

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "ptsim/commands.hpp"
#include "ptsim/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Coincidence probabilities and exceptional points in lossy linear optical networks", "ptsim"};
    app.require_subcommand(1, 1);

    std::string config_path;
    ptsim::RunOverrides overrides;
    std::optional<double> gamma_min;
    std::optional<double> gamma_max;
    std::optional<std::size_t> steps;
    std::optional<std::string> method;
    std::optional<std::string> out;

    for (const char* name : {"sweep", "threshold", "crossing", "validate", "schur"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "run configuration (JSON)")->required();
        sub->add_option("--gamma-min", gamma_min);
        sub->add_option("--gamma-max", gamma_max);
        sub->add_option("--steps", steps);
        sub->add_option("--method", method)
            ->check(CLI::IsMember({"scattering", "lindblad", "closed_form", "all"}));
        sub->add_option("--out", out, "CSV destination (sweep); overrides output_path");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ptsim::ErrorKind::validation);
    }

    try {
        const ptsim::Command command = ptsim::parse_command(app.get_subcommands().front()->get_name());
        ptsim::RunConfig config = ptsim::load_config(config_path);
        overrides.gamma_min = gamma_min;
        overrides.gamma_max = gamma_max;
        overrides.steps = steps;
        overrides.output_path = out;
        if (method) {
            if (*method == "all") {
                overrides.methods = {ptsim::Method::scattering, ptsim::Method::lindblad, ptsim::Method::closed_form};
            } else {
                overrides.methods = std::vector<ptsim::Method>{ptsim::parse_method(*method)};
            }
        }
        ptsim::apply_overrides(config, overrides);
        return ptsim::run_command(config, command, std::cout, std::cerr);
    } catch (const ptsim::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.kind());
    }
}
