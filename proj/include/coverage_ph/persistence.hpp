#pragma once

#include "coverage_ph/filtration.hpp"
#include "coverage_ph/ingest.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace coverage_ph {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Paper-style radius parameter r relates to our diameter-convention value by r = value / 2.
inline constexpr double kRadiusPerDiameter = 0.5;

struct PersistencePair {
    int dim = 0;
    double birth = 0.0;
    double death = kInfinity;
    std::vector<VertexId> birth_simplex;
    std::vector<VertexId> death_simplex;  // empty for essential classes

    bool essential() const { return death == kInfinity; }
    double persistence() const { return death - birth; }
};

struct DiagramSummary {
    std::size_t count[2] = {0, 0};
    std::size_t finite[2] = {0, 0};
    std::size_t essential[2] = {0, 0};
    std::optional<double> mean_death[2];
    std::optional<double> pooled_mean_death;
    // Largest finite H0 death: the scale at which the sparse graph's
    // components stop merging.
    std::optional<double> connectivity_horizon;
};

struct Diagram {
    std::string label;
    std::vector<PersistencePair> pairs;
    DiagramSummary summary;
};

DiagramSummary summarize(std::span<const PersistencePair> pairs);

// Union-find over edges in filtration order with the elder rule. Returns one
// pair per vertex; finite deaths are the minimum spanning forest weights.
std::vector<PersistencePair> compute_h0(const Filtration& filtration);

// 1-cycles from boundary-matrix reduction over Z/2. Zero-persistence pairs are
// dropped; cycles never filled in the sparse complex come back essential.
std::vector<PersistencePair> compute_h1(const Filtration& filtration);

Diagram compute_diagram(const Filtration& filtration, std::string label);

using BoundaryColumns = std::vector<std::vector<std::size_t>>;

// Face positions for every simplex, in filtration order.
BoundaryColumns boundary_columns(const Filtration& filtration);

struct BoundaryReduction {
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    // Lowest nonzero row of each reduced column, kNone when it reduced to zero
    // (or was cleared).
    std::vector<std::size_t> low;
    // Column that owns row r as its pivot, kNone if none.
    std::vector<std::size_t> pivot_column;

    // (creator, destroyer) column pairs, sorted by destroyer.
    std::vector<std::pair<std::size_t, std::size_t>> pairs() const;
};

// Twist reduction: columns are processed from the highest dimension down and
// each pivot clears the column of its row. Column dimension is inferred from
// its length (k faces -> dimension k-1).
BoundaryReduction reduce_boundary_matrix(const BoundaryColumns& columns);

struct DeathFeature {
    int dim = 0;
    double birth = 0.0;
    double death = 0.0;
    std::vector<VertexId> vertices;
    std::vector<std::string> ids;
    std::vector<LatLon> coordinates;
};

// Finite pairs with death >= min_death, located at their death simplex,
// sorted by death descending.
std::vector<DeathFeature> extract_death_simplices(std::span<const PersistencePair> pairs,
                                                  std::span<const Facility> facilities,
                                                  double min_death);

// Finite death values of the requested dimensions, in pair order.
enum class DeathSelection { H0, H1, Pooled };
DeathSelection parse_death_selection(std::string_view token);
std::string_view to_string(DeathSelection selection);
std::vector<double> finite_deaths(std::span<const PersistencePair> pairs, DeathSelection which);

} // namespace coverage_ph
