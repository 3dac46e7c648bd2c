// Command-line driver for the controllability toolkit. Every subcommand maps
// onto one shum_experiment_run call; flags mirror config keys one-to-one and
// override values loaded from --config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "shum.h"

namespace {

struct Invocation {
    std::string subcommand;
    std::string config_path;
    std::string output_path;
    // (key, value) pairs in the order given on the command line.
    std::vector<std::pair<std::string, std::string>> settings;
};

const std::vector<std::pair<std::string, std::string>>& key_help() {
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"N", "interior nodes (h = 1/(N+1))"},
        {"K", "time levels / tree depth (1..16)"},
        {"T", "time horizon"},
        {"delta", "weight time-shift, in (0, 1/2)"},
        {"lambda", "weight scaling"},
        {"mu", "weight steepness"},
        {"C", "constant in the eps = exp(-C/h) rule"},
        {"eps", "fixed penalty (overrides the rule when > 0)"},
        {"eps_T", "terminal regularization for observability"},
        {"G0", "control region as lo,hi"},
        {"G1", "intermediate region as lo,hi"},
        {"G2", "weight core region as lo,hi"},
        {"margin", "weight profile margin"},
        {"a1", "drift coefficient expression in (t, x)"},
        {"a2", "noise coefficient expression in (t, x)"},
        {"y0", "initial state expression in x"},
        {"tol", "solver / verification tolerance"},
        {"seed", "random seed"},
        {"trials", "random trials for verify-identities"},
        {"t_samples", "time samples for the weights dump"},
        {"max_iter", "iteration cap (0 = automatic)"},
        {"workers", "sweep worker threads (0 = SHUM_WORKERS or hardware)"},
        {"lambda0", "regime threshold: lambda >= lambda0 (T + T^2)"},
        {"eps0", "regime threshold: lambda h / (delta T^2) <= eps0"},
        {"h0", "regime threshold: h <= h0"},
        {"N_list", "sweep N values, comma-separated"},
        {"T_list", "sweep T values, comma-separated"},
    };
    return keys;
}

void add_key_flags(CLI::App* cmd, Invocation& inv) {
    for (const auto& [key, help] : key_help()) {
        std::string name = "--" + key;
        if (key == "N") name += ",--n";
        cmd->add_option_function<std::string>(
               name,
               [&inv, key = key](const std::string& value) {
                   inv.settings.emplace_back(key, value);
               },
               help)
            ->type_name("VALUE");
    }
    cmd->add_option("--config", inv.config_path, "flat key=value config file")
        ->type_name("PATH");
    cmd->add_option("-o,--output", inv.output_path, "write output to a file instead of stdout")
        ->type_name("PATH");
}

struct ExperimentDeleter {
    void operator()(shum_experiment* exp) const { shum_experiment_destroy(exp); }
};

int run(const Invocation& inv) {
    std::unique_ptr<shum_experiment, ExperimentDeleter> exp(shum_experiment_create());
    if (!exp) {
        std::cerr << "shum: failed to allocate an experiment handle\n";
        return SHUM_ERROR_INTERNAL;
    }

    auto check = [&](shum_status status) {
        if (status != SHUM_OK)
            std::cerr << "shum: " << shum_status_name(status) << " error: "
                      << shum_experiment_error(exp.get()) << "\n";
        return status;
    };

    if (!inv.config_path.empty()) {
        shum_status status = check(shum_experiment_load_config(exp.get(), inv.config_path.c_str()));
        if (status != SHUM_OK) return status;
    }
    for (const auto& [key, value] : inv.settings) {
        shum_status status = check(shum_experiment_set(exp.get(), key.c_str(), value.c_str()));
        if (status != SHUM_OK) return status;
    }

    shum_status status = shum_experiment_run(exp.get(), inv.subcommand.c_str());
    const char* output = shum_experiment_output(exp.get());

    if (inv.output_path.empty()) {
        std::cout << output;
    } else {
        std::ofstream out(inv.output_path);
        if (!out.good()) {
            std::cerr << "shum: cannot open output file '" << inv.output_path << "'\n";
            return SHUM_ERROR_CONFIG;
        }
        out << output;
    }
    check(status);
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("stochastic fourth-order controllability toolkit (")
                 + shum_version() + ")"};
    app.require_subcommand(1);

    Invocation inv;
    const std::vector<std::pair<std::string, std::string>> subcommands = {
        {"verify-identities", "run the discrete product/summation-by-parts identity suite"},
        {"weights", "dump the Carleman weight profiles as CSV"},
        {"simulate", "run the uncontrolled forward dynamics, CSV of level energies"},
        {"control", "run one penalized-HUM control experiment, CSV row"},
        {"observability", "estimate the observability constant by power iteration"},
        {"sweep", "control experiments over N_list x T_list, CSV row per point"},
        {"carleman", "print the weighted functional table for a backward probe"},
    };
    for (const auto& [name, help] : subcommands) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_key_flags(cmd, inv);
        cmd->callback([&inv, name = name] { inv.subcommand = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the message
        return SHUM_ERROR_CONFIG;
    }
    return run(inv);
}
