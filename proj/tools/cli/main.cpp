#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace fracprop::cli;
    CLI::App app{"Triangular fractional-in-time systems with constant-coefficient symbols"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions opts;
    app.add_option("-c,--config", opts.config, "run configuration (JSON)");
    app.add_option("--workers", opts.workers, "worker threads (env FRACPROP_WORKERS)")
        ->check(CLI::PositiveNumber);
    app.add_option("--tol", opts.tol, "tolerance override")->check(CLI::PositiveNumber);
    app.add_option("-o,--output", opts.output, "output directory");
    app.add_option("--format", opts.format, "solution format")->check(CLI::IsMember({"csv", "json"}));

    app.add_option("--only", opts.only, "verify: run a single check family")
        ->check(CLI::IsMember(check_families()));

    auto* validate = app.add_subcommand("validate", "check the system conditions");
    auto* solve = app.add_subcommand("solve", "solve the Cauchy problem at the requested times");
    auto* verify = app.add_subcommand("verify", "run the verification checks");
    auto* bench = app.add_subcommand("bench", "time solves against m and workers");

    double beta = 0.0, mu = 1.0, x = 0.0;
    auto* ml = app.add_subcommand("ml", "evaluate E_{beta,mu}(x)");
    ml->add_option("--beta", beta)->required();
    ml->add_option("--mu", mu);
    ml->add_option("--x", x)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (ml->parsed()) return cmd_ml(beta, mu, x, std::cout, std::cerr);
    if (opts.config.empty()) {
        std::cerr << "--config is required\n";
        return 2;
    }
    if (validate->parsed()) return cmd_validate(opts, std::cout, std::cerr);
    if (solve->parsed()) return cmd_solve(opts, std::cout, std::cerr);
    if (verify->parsed()) return cmd_verify(opts, std::cout, std::cerr);
    if (bench->parsed()) return cmd_bench(opts, std::cout, std::cerr);
    return 2;
}
