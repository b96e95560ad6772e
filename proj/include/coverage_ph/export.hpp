#pragma once

#include "coverage_ph/persistence.hpp"
#include "coverage_ph/stats.hpp"

#include <nlohmann/json.hpp>

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace coverage_ph {

// `dim,birth,death,birth_vertices,death_vertices`; vertices are facility ids
// joined with ';'; essential classes carry death `inf`.
void write_pairs_csv(std::ostream& out, std::span<const PersistencePair> pairs,
                     std::span<const std::string> ids);

// H0 deaths as LineString, H1 deaths as Polygon; coordinates are [lon, lat].
nlohmann::ordered_json death_geojson(std::span<const DeathFeature> features);

// Birth/death scatter with the diagonal, essential classes on a top band and
// a dotted guideline at the mean finite death.
void write_diagram_svg(std::ostream& out, const Diagram& diagram);

struct SignificanceReport {
    std::string scenario_a;
    std::string scenario_b;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    double trim_threshold = 0.0;
    std::vector<TestResult> tests;
};

nlohmann::ordered_json to_json(const SignificanceReport& report);

} // namespace coverage_ph
