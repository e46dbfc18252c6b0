#include <CLI11.hpp>
#include <iostream>

#include "moyal_scatter/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"moyal-scatter: scattering and implementability workbench for the "
                 "Dirac field in commutative and Moyal-deformed potentials"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int refine = 3;

    const std::vector<std::string> names = {"star-check", "evolve",     "scatter",
                                            "implementability", "bogoliubov",
                                            "fock-check", "lm-probe",   "all"};
    std::string chosen;
    for (const auto& n : names) {
        CLI::App* sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "path to the JSON run configuration")
            ->required();
        sub->add_option("--out-dir", out_dir, "output directory (overrides config)");
        sub->add_option("--refine", refine, "number of refinement levels (2..5)");
        sub->callback([&chosen, n] { chosen = n; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        msc::RunConfig cfg = msc::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        return msc::run_subcommand(chosen, cfg, refine);
    } catch (const msc::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const msc::invalid_input& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const msc::numerical_error& e) {
        std::cerr << "numerical certification failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
