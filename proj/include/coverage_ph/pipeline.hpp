#pragma once

#include "coverage_ph/export.hpp"
#include "coverage_ph/persistence.hpp"
#include "coverage_ph/traveltime.hpp"

#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

namespace coverage_ph {

enum class ProviderKind { Synthetic, Live };

ProviderKind parse_provider_kind(std::string_view token);

struct RunConfig {
    std::filesystem::path facilities;
    std::filesystem::path counties;
    std::filesystem::path cache = "travel_cache.jsonl";
    std::filesystem::path output_dir = ".";
    ProviderKind provider = ProviderKind::Synthetic;
    std::size_t k = kDefaultNeighborCount;
    double trim_minutes = kDefaultTrimMinutes;
    double death_filter_minutes = 150.0;
    std::optional<Scenario> scenario;  // unset: both where it matters
    SyntheticSpeeds speeds;
    std::size_t concurrency = 4;
    NeighborMode neighbor_mode = NeighborMode::Recompute;
    DeathSelection death_selection = DeathSelection::H0;
    std::string api_url = std::string(RoutesApiProvider::kDefaultBaseUrl);
    bool dump_filtration = false;

    // Throws ValidationError on out-of-range values or a live provider
    // without ROUTING_API_KEY.
    void validate() const;
};

// Flat `key = value` document; `[section]` headers prefix the keys that
// follow (`[speeds]` then `car = 70` sets `speeds.car`). Relative paths are
// resolved against base_dir.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

struct Dataset {
    std::vector<Facility> facilities;
    CountyTable counties;
};

Dataset load_dataset(const RunConfig& config);

struct ScenarioInput {
    Scenario scenario = Scenario::All;
    std::vector<Facility> facilities;
    NeighborGraph graph;
};

ScenarioInput prepare_scenario(const Dataset& data, Scenario scenario, const RunConfig& config);

std::unique_ptr<RoutingProvider> make_provider(const RunConfig& config);

// Fetches every leg the selected scenarios need (both when none is selected)
// and persists the cache, including after partial failure.
FetchSummary cmd_fetch(const RunConfig& config, std::ostream& log);
FetchSummary cmd_fetch(const RunConfig& config, const RoutingProvider& provider, std::ostream& log);

struct AnalyzeResult {
    Scenario scenario = Scenario::All;
    std::vector<Facility> facilities;
    DissimilarityMatrix matrix;
    std::size_t edge_count = 0;
    std::size_t triangle_count = 0;
    Diagram diagram;
    std::vector<DeathFeature> death_features;
};

// Cache-only analysis; writes dissimilarity_, pairs_, deaths_ and diagram_
// files for the scenario into output_dir.
AnalyzeResult cmd_analyze(const RunConfig& config, Scenario scenario, std::ostream& log);

// Analyzes both scenarios and writes significance_report.json.
SignificanceReport cmd_compare(const RunConfig& config, std::ostream& log);

} // namespace coverage_ph
