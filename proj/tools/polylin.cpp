#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace polylin::cli;

namespace {

void add_common(CLI::App* sub, RunConfig& cfg, std::vector<double>& interval) {
    sub->add_option("--function", cfg.function, "gaussian | chirp | poly7 | polynomial(c0,c1,...) | expression(...)");
    sub->add_option("--interval", interval, "domain endpoints a b")->expected(2);
    sub->add_option("--segments,-N", cfg.segments, "number of segments");
    sub->add_option("--tolerance", cfg.tolerance, "target L1 error; N comes from the planner");
    sub->add_option("--partition", cfg.partition, "uniform | optimized");
    sub->add_option("--fit", cfg.fit, "interpolant | l2 | l1");
    sub->add_option("--out,-o", cfg.out, "output file (default stdout)");
    sub->add_option("--format", cfg.format, "csv | json");
    sub->add_option("--seed", cfg.seed, "random seed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous piecewise-linear L1 approximation"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string experiment;
    std::vector<double> interval;

    auto* partition = app.add_subcommand("partition", "print a partition");
    auto* fit = app.add_subcommand("fit", "fit a polygonal approximant");
    auto* error = app.add_subcommand("error", "measured L1 error and bounds");
    auto* plan = app.add_subcommand("plan", "segments needed for a tolerance");
    auto* bench = app.add_subcommand("bench", "time the evaluator");
    auto* reproduce = app.add_subcommand("reproduce", "regenerate a reference table");
    for (auto* s : {partition, fit, error, plan, bench, reproduce}) add_common(s, cfg, interval);
    error->add_option("--model", cfg.model, "model JSON written by fit");
    bench->add_option("--evals", cfg.evals, "evaluations per repetition");
    reproduce->add_option("experiment", experiment, "gaussian04 | gaussian08 | chirp | gain")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : bad_config;
    }
    if (interval.size() == 2) cfg.interval = std::pair{interval[0], interval[1]};

    return guarded(cfg, [&]() -> int {
        apply_environment(cfg);
        if (partition->parsed()) return cmd_partition(cfg, std::cout);
        if (fit->parsed()) return cmd_fit(cfg, std::cout);
        if (error->parsed()) return cmd_error(cfg, std::cout);
        if (plan->parsed()) return cmd_plan(cfg, std::cout);
        if (bench->parsed()) return cmd_bench(cfg, std::cout);
        return cmd_reproduce(experiment, cfg, std::cout);
    });
}
