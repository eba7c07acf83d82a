#include <cstdint>
#include <iostream>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "rmiga/config.hpp"
#include "rmiga/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Isogeometric Reissner-Mindlin plate solver"};

    std::string config_path;
    std::string output_dir = ".";
    int threads = 0;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "Run configuration (JSON)")->required();
    app.add_option("--output", output_dir, "Directory for artifacts (default: .)");
    app.add_option("--threads", threads, "Worker threads, 0 = auto (assembly stays deterministic)");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized verify checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1; // nonzero flag errors are validation failures
    }

    try {
        if (threads < 0)
            throw rmiga::InvalidArgument("--threads must be non-negative");
        Eigen::setNbThreads(threads);

        rmiga::RunConfig config = rmiga::load_config_file(config_path);
        if (seed_opt->count() > 0)
            config.seed = seed;

        const std::vector<std::string> artifacts = rmiga::run(config, output_dir, std::cout);
        for (const std::string& path : artifacts)
            std::cout << "wrote " << path << "\n";
        return 0;
    } catch (const rmiga::InvalidArgument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const rmiga::NumericalError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
