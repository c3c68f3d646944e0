// command-line front end: run / validate scenario configs, list bundled ones
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nhjump/scenario.hpp"

int main(int argc, char** argv) {
    // keep BLAS/Eigen threading explicit; default to single-threaded runs
    const char* threads = std::getenv("NHJUMP_THREADS");
    setenv("OPENBLAS_NUM_THREADS", threads ? threads : "1", 1);
    Eigen::setNbThreads(threads ? std::atoi(threads) : 1);

    CLI::App app{"Lindblad dynamics via non-Hermitian perturbation theory"};
    app.set_version_flag("--version", nhjump::version_string);

    std::string run_ref, run_outdir = ".", validate_ref;
    auto* cmd_run = app.add_subcommand("run", "execute a scenario and write its artifacts");
    cmd_run->add_option("config", run_ref, "config file path or bundled scenario name")
        ->required();
    cmd_run->add_option("-o,--outdir", run_outdir, "directory for output files");

    auto* cmd_list = app.add_subcommand("list", "show the bundled scenarios");

    auto* cmd_validate =
        app.add_subcommand("validate", "check a scenario config without running it");
    cmd_validate->add_option("config", validate_ref, "config file path or bundled scenario name")
        ->required();

    if (argc < 2) {
        std::cerr << app.help();
        return 1;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (cmd_list->parsed()) {
            for (const auto& b : nhjump::builtin_scenarios())
                std::cout << b.name << "  -  " << b.description << "\n";
            return 0;
        }
        if (cmd_validate->parsed()) {
            nhjump::Scenario sc = nhjump::load_scenario(validate_ref);
            nhjump::validate_scenario(sc);
            std::cout << "OK: " << sc.model << "/" << sc.task << " (" << sc.source << ")\n";
            return 0;
        }
        nhjump::Scenario sc = nhjump::load_scenario(run_ref);
        nhjump::validate_scenario(sc);
        auto files = nhjump::run_scenario(sc, run_outdir);
        for (const auto& f : files) std::cout << f.string() << "\n";
        return 0;
    } catch (const nhjump::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nhjump::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
