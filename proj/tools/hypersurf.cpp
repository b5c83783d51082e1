// hypersurf: fractal hypersurfaces on subdivided simplices.
//
//   hypersurf surface --config run.json     lattice CSV, OBJ mesh, manifest
//   hypersurf chaos   --config run.json     base and graph chaos-game clouds
//   hypersurf dim     --config run.json     box counts, oscillation profile, bounds
//   hypersurf measure --config run.json     region masses and pushforward check
//   hypersurf verify  --config run.json     every hard invariant; exit 0 iff all pass

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hypersurf/config.hpp"
#include "hypersurf/errors.hpp"
#include "hypersurf/kernels.hpp"
#include "hypersurf/pipeline.hpp"

int main(int argc, char** argv) {
    using namespace hypersurf;

    CLI::App app{"Non-affine fractal hypersurfaces: construction, sampling and dimension"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    int threads = 0;
    bool verbose = false;

    const char* names[] = {"surface", "chaos", "dim", "measure", "verify"};
    const char* help[] = {"Compute the fixed point and export surface.csv, surface.obj and manifest.json",
                          "Sample the base and graph measures with the chaos game",
                          "Box-count slope, oscillation profile and closed-form dimension bounds",
                          "Empirical region masses and the pushforward check",
                          "Run every hard check and print a report"};
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], help[i]);
        sub->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
        sub->add_option("--out", out_override, "Override the config's output directory");
        sub->add_flag("--verbose", verbose, "Progress messages on stderr");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config = load_config(config_path);
        if (!out_override.empty()) config.out = out_override;
        kernels::set_thread_count(threads);
        RunOptions options;
        options.verbose = verbose ? &std::cerr : nullptr;
        if (verbose) std::cerr << "threads: " << kernels::thread_count() << "\n";

        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "surface") run_surface(config, std::cout, options);
        else if (cmd == "chaos") run_chaos(config, std::cout, options);
        else if (cmd == "dim") run_dim(config, std::cout, options);
        else if (cmd == "measure") run_measure(config, std::cout, options);
        else return run_verify(config, std::cout, options);
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceFailure& e) {
        std::cerr << "convergence failure: " << e.what() << " (last residual " << e.last_residual() << " after "
                  << e.iterations() << " iterations)\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
