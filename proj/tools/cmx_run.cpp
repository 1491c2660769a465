// Command-line runner for the controllability experiments.
//
//   cmx run <config.json> [--output-dir DIR] [--max-periods N] [--tol X]
//   cmx presets [--write DIR]
//
// Exit codes: 0 ok, 1 configuration error, 2 solver failure.

#include "cmx/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"2D time-harmonic Maxwell solver by exact controllability"};
    app.require_subcommand(1);

    std::string config_path, output_dir, write_dir;
    int max_periods = -1;
    double tol = -1.0;

    CLI::App* run = app.add_subcommand("run", "run one experiment from a JSON config");
    run->add_option("config", config_path, "path to the config file")->required();
    run->add_option("--output-dir", output_dir, "override the config's output directory");
    run->add_option("--max-periods", max_periods, "override the simulated-period budget");
    run->add_option("--tol", tol, "override the CG stopping tolerance");

    CLI::App* pre = app.add_subcommand("presets", "list the built-in experiment presets");
    pre->add_option("--write", write_dir, "write each preset config as <name>.json into DIR");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (pre->parsed())
        {
            const auto all = cmx::presets();
            for (const auto& p : all)
            {
                std::printf("%-18s %s%s\n", p.name.c_str(), p.description.c_str(),
                            p.needs_msh ? " [requires user-supplied msh]" : "");
                if (!write_dir.empty())
                {
                    std::filesystem::create_directories(write_dir);
                    std::ofstream out(std::filesystem::path(write_dir) / (p.name + ".json"));
                    out << p.config_json << "\n";
                }
            }
            return 0;
        }

        cmx::ExperimentConfig config = cmx::load_config(config_path);
        cmx::RunOverrides overrides;
        overrides.output_dir = output_dir;
        overrides.max_periods = max_periods;
        overrides.tol = tol;

        const cmx::RunSummary s = cmx::run_experiment(config, overrides);
        if (s.fs_error >= 0.0)
            std::printf("fs_error %.6e\n", s.fs_error);
        if (s.rows > 0)
            std::printf("rows %d final_err %.6e final_misfit %.6e\n", s.rows, s.final_error,
                        s.final_misfit);
        return 0;
    }
    catch (const cmx::ConfigError& e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 2;
    }
}
