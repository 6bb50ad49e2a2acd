#include <CLI11.hpp>
#include <iostream>

#include "hgf/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"hgf: discrete hyperbolic geometric flow on chart grids"};
    hgf::cli::Invocation inv;
    std::string out;
    std::uint64_t seed = 0;
    std::vector<int> ladder;
    app.add_option("-c,--config", inv.config, "run configuration (key = value)")->required()->check(CLI::ExistingFile);
    auto* out_opt = app.add_option("-o,--out", out, "output directory (overrides output.dir)");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides run.seed)");
    auto* ladder_opt = app.add_option("--ladder", ladder, "points per axis for each rung")->delimiter(',');
    app.add_flag("-q,--quiet", inv.quiet, "only report errors");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hgf::cli::kExitConfig;
    }
    if (*out_opt) inv.out_dir = out;
    if (*seed_opt) inv.seed = seed;
    if (*ladder_opt) inv.ladder = ladder;
    return hgf::cli::execute(inv, std::cout);
}
