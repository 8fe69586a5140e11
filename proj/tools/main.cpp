#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "divmdp/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "Diversity indices on countable alphabets: plug-in estimation, "
        "asymptotic variances, and moderate-deviation diagnostics"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format;
    unsigned threads = 1;
    app.add_option("--seed", seed, "override the config master seed");
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--format", format, "output format: csv or structured-text")
        ->check(CLI::IsMember({"csv", "structured-text", "json"}));
    app.add_option("--threads", threads, "worker threads for simulation")
        ->check(CLI::Range(1u, 64u));

    divmdp::cli::EstimateOptions eopt;
    auto* estimate = app.add_subcommand(
        "estimate", "plug-in index estimate and confidence interval from a counts CSV");
    estimate->fallthrough();
    estimate->add_option("--counts", eopt.counts_path, "CSV of label,count rows")
        ->required();
    estimate->add_option("--alpha", eopt.alpha, "index exponent alpha")->required();
    estimate->add_option("--gamma", eopt.gamma, "index exponent gamma (default 0)");
    estimate
        ->add_option("--transform", eopt.transform,
                     "none, tsallis, renyi or hill (default none)")
        ->check(CLI::IsMember({"none", "tsallis", "renyi", "hill"}));
    estimate->add_option("--level", eopt.level, "confidence level (default 0.95)");

    std::vector<double> alphas;
    std::vector<double> gammas;
    auto* catalog = app.add_subcommand(
        "catalog", "Holder exponent and certificate constants over a parameter grid");
    catalog->fallthrough();
    catalog->add_option("--alphas", alphas, "comma-separated alpha grid")
        ->delimiter(',')
        ->required();
    catalog->add_option("--gammas", gammas, "comma-separated gamma grid")
        ->delimiter(',')
        ->required();

    std::string config_path;
    auto* validate = app.add_subcommand(
        "validate", "check the moderate-deviation scale conditions over the n grid");
    validate->fallthrough();
    validate->add_option("--config", config_path, "experiment config (JSON)")
        ->required();
    auto* simulate = app.add_subcommand(
        "simulate", "replicate sampling with CLT-style diagnostics per n");
    simulate->fallthrough();
    simulate->add_option("--config", config_path, "experiment config (JSON)")
        ->required();
    auto* rate = app.add_subcommand(
        "rate", "empirical moderate-deviation rate curve");
    rate->fallthrough();
    rate->add_option("--config", config_path, "experiment config (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    divmdp::cli::CommonOptions common;
    common.seed = seed;
    common.out_path = out_path;
    common.threads = threads;
    if (!format.empty()) common.format = divmdp::cli::parse_format(format);

    if (app.got_subcommand(estimate)) {
        return divmdp::cli::cmd_estimate(eopt, common, std::cout, std::cerr);
    }
    if (app.got_subcommand(catalog)) {
        return divmdp::cli::cmd_catalog(alphas, gammas, common, std::cout, std::cerr);
    }
    if (app.got_subcommand(validate)) {
        return divmdp::cli::cmd_validate(config_path, common, std::cout, std::cerr);
    }
    if (app.got_subcommand(simulate)) {
        return divmdp::cli::cmd_simulate(config_path, common, std::cout, std::cerr);
    }
    return divmdp::cli::cmd_rate(config_path, common, std::cout, std::cerr);
}
