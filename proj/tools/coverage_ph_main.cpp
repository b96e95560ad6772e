#include "coverage_ph/error.hpp"
#include "coverage_ph/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Overrides {
    std::string config_path;
    std::string scenario;
    std::string provider;
    std::string output_dir;
    std::optional<std::size_t> k;
    std::optional<double> trim;
    std::optional<double> death_filter;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "Run configuration file")->required();
    cmd->add_option("--scenario", o.scenario, "all | fqhc")->check(CLI::IsMember({"all", "fqhc"}));
    cmd->add_option("--provider", o.provider, "live | synthetic")->check(CLI::IsMember({"live", "synthetic"}));
    cmd->add_option("--k", o.k, "Nearest neighbors queried per facility");
    cmd->add_option("--trim", o.trim, "Drop deaths at or below this many minutes");
    cmd->add_option("--death-filter", o.death_filter, "Minimum death (minutes) for the map export");
    cmd->add_option("--output-dir", o.output_dir, "Directory for exported artifacts");
}

coverage_ph::RunConfig resolve_config(const Overrides& o) {
    auto config = coverage_ph::load_config(o.config_path);
    if (!o.scenario.empty()) config.scenario = coverage_ph::parse_scenario(o.scenario);
    if (!o.provider.empty()) config.provider = coverage_ph::parse_provider_kind(o.provider);
    if (!o.output_dir.empty()) config.output_dir = o.output_dir;
    if (o.k) config.k = *o.k;
    if (o.trim) config.trim_minutes = *o.trim;
    if (o.death_filter) config.death_filter_minutes = *o.death_filter;
    config.validate();
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coverage-gap analysis with persistent homology over travel times"};
    app.name("coverage-ph");
    app.require_subcommand(1);

    Overrides fetch_opts;
    Overrides analyze_opts;
    Overrides compare_opts;
    auto* fetch = app.add_subcommand("fetch", "Fetch and cache travel-time legs for the neighbor pairs");
    add_common(fetch, fetch_opts);
    auto* analyze = app.add_subcommand("analyze", "Build the filtration and export persistence results");
    add_common(analyze, analyze_opts);
    auto* compare = app.add_subcommand("compare", "Compare death times of both scenarios");
    add_common(compare, compare_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (fetch->parsed()) {
            coverage_ph::cmd_fetch(resolve_config(fetch_opts), std::cout);
        } else if (analyze->parsed()) {
            auto config = resolve_config(analyze_opts);
            coverage_ph::cmd_analyze(config, config.scenario.value_or(coverage_ph::Scenario::All),
                                     std::cout);
        } else if (compare->parsed()) {
            coverage_ph::cmd_compare(resolve_config(compare_opts), std::cout);
        }
    } catch (const coverage_ph::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const coverage_ph::ProviderError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
