#pragma once

#include "coverage_ph/ingest.hpp"

#include <compare>
#include <cstddef>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coverage_ph {

enum class Mode { Car, Transit, Walk };

inline constexpr Mode kAllModes[] = {Mode::Car, Mode::Transit, Mode::Walk};

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view token);

// Per-mode durations in minutes; an empty optional means the mode has no route.
struct ModeTimes {
    std::optional<double> car;
    std::optional<double> transit;
    std::optional<double> walk;

    std::optional<double>& operator[](Mode m);
    const std::optional<double>& operator[](Mode m) const;
};

// A source of one-way travel durations. Implementations must be safe to call
// from several threads at once.
class RoutingProvider {
public:
    virtual ~RoutingProvider() = default;
    virtual std::string name() const = 0;
    // Duration in seconds, or nullopt when the mode has no route between the
    // points. Throws ProviderError on transport or service failure.
    virtual std::optional<double> duration_seconds(LatLon origin, LatLon dest, Mode mode) const = 0;
};

struct SyntheticSpeeds {
    double car_kmh = 65.0;
    double transit_kmh = 30.0;
    double walk_kmh = 5.0;

    double for_mode(Mode mode) const;
};

// Straight-line distance at a fixed speed per mode. Deterministic and offline.
double synthetic_mode_time(LatLon a, LatLon b, Mode mode, const SyntheticSpeeds& speeds = {});

class SyntheticProvider final : public RoutingProvider {
public:
    explicit SyntheticProvider(SyntheticSpeeds speeds = {});
    std::string name() const override { return "synthetic"; }
    std::optional<double> duration_seconds(LatLon origin, LatLon dest, Mode mode) const override;

private:
    SyntheticSpeeds speeds_;
};

// Client for a Routes-style HTTPS API (`POST /directions/v2:computeRoutes`).
class RoutesApiProvider final : public RoutingProvider {
public:
    static constexpr std::string_view kDefaultBaseUrl = "https://routes.googleapis.com";
    static constexpr std::string_view kApiKeyEnv = "ROUTING_API_KEY";

    RoutesApiProvider(std::string api_key, std::string base_url = std::string(kDefaultBaseUrl),
                      int timeout_seconds = 30);

    // Reads the key from ROUTING_API_KEY; throws ValidationError when unset.
    static RoutesApiProvider from_environment(std::string base_url = std::string(kDefaultBaseUrl));

    std::string name() const override { return "routes-api"; }
    std::optional<double> duration_seconds(LatLon origin, LatLon dest, Mode mode) const override;

private:
    std::string api_key_;
    std::string base_url_;
    int timeout_seconds_;
};

std::string routes_request_body(LatLon origin, LatLon dest, Mode mode);
// Parses a computeRoutes response; nullopt when it carries no route.
std::optional<double> parse_routes_response(std::string_view body);

struct CacheKey {
    std::string origin;
    std::string dest;
    Mode mode = Mode::Car;

    auto operator<=>(const CacheKey&) const = default;
};

struct CacheEntry {
    std::optional<double> seconds;
    std::string provider;
    std::string fetched;
};

// One-way legs keyed by (origin id, destination id, mode). Stored as raw
// provider seconds. Thread-safe.
class TravelCache {
public:
    TravelCache() = default;
    TravelCache(const TravelCache& other);
    TravelCache& operator=(const TravelCache& other);

    std::optional<CacheEntry> lookup(const CacheKey& key) const;
    bool contains(const CacheKey& key) const;
    // Identical seconds for an existing key are ignored; different seconds throw.
    void record(const CacheKey& key, CacheEntry entry);
    std::size_t size() const;

    // travel_cache.jsonl, one record per line, sorted by key.
    void load(std::istream& in);
    void save(std::ostream& out) const;
    static TravelCache load_file(const std::string& path); // missing file -> empty cache
    void save_file(const std::string& path) const;

private:
    mutable std::mutex mutex_;
    std::map<CacheKey, CacheEntry> entries_;
};

std::string utc_timestamp_now();

struct RetryPolicy {
    int attempts = 3;
    int backoff_ms = 200;
};

// Cache first; queries the provider only on a miss and records the result.
// Returns one-way minutes, nullopt for an unsupported mode.
std::optional<double> fetch_one_way(const RoutingProvider& provider, TravelCache& cache,
                                    const Facility& origin, const Facility& dest, Mode mode,
                                    RetryPolicy retry = {});

// t_mode(x, y) = t(x -> y) + t(y -> x) for a single mode, read from the cache.
// Absent when either leg is absent. Throws ProviderError if a leg was never fetched.
std::optional<double> round_trip_mode_time(const Facility& x, const Facility& y,
                                           const TravelCache& cache, Mode mode);
ModeTimes round_trip_times(const Facility& x, const Facility& y, const TravelCache& cache);

// Share of the county population with car access, clamped to [0, 1].
double vehicle_access_ratio(const CountyStats& county);

// V * min{car, transit, walk} + (1 - V) * min{transit, walk}, over present modes.
// Throws ValidationError when neither transit nor walk is present.
double origin_weighted_time(const ModeTimes& round_trips, double access_ratio);

// Population-weighted average of the two directed times.
double symmetrized_dissimilarity(double d_xy, double d_yx, double population_x,
                                 double population_y);
double symmetrized_dissimilarity(const Facility& x, const Facility& y, double d_xy, double d_yx,
                                 const CountyTable& counties);

enum class Scenario { All, FqhcOnly };

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view token);

enum class NeighborMode { Recompute, Induced };

std::vector<Facility> scenario_facilities(std::span<const Facility> facilities, Scenario scenario);

// Neighbor structure for a scenario subset. Recompute runs k-NN on the subset;
// Induced keeps the full-set k-NN lists restricted to the subset.
NeighborGraph scenario_graph(std::span<const Facility> all, std::span<const Facility> subset,
                             std::size_t k, NeighborMode mode);

using IndexPair = std::pair<std::size_t, std::size_t>;

// Unordered pairs {i, j}, i < j, where either lists the other.
std::vector<IndexPair> neighbor_pairs(const NeighborGraph& graph);

// Sparse symmetric dissimilarity in minutes. Pairs not stored never form an edge.
struct DissimilarityMatrix {
    Scenario scenario = Scenario::All;
    std::vector<std::string> ids;
    std::map<IndexPair, double> entries;

    std::size_t n() const { return ids.size(); }
    std::optional<double> at(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, double minutes);
};

struct FetchSummary {
    std::size_t fetched = 0;
    std::size_t cached = 0;
    std::size_t absent = 0;
    std::vector<std::string> failures;
};

// Fills the cache with both directed legs of every pair for every mode.
FetchSummary fetch_legs(std::span<const Facility> facilities, std::span<const IndexPair> pairs,
                        const RoutingProvider& provider, TravelCache& cache,
                        std::size_t max_in_flight = 4, RetryPolicy retry = {});

// Legs missing from the cache, formatted "o->d/mode".
std::vector<std::string> missing_legs(std::span<const Facility> facilities,
                                      std::span<const IndexPair> pairs, const TravelCache& cache);

// Cache-only assembly. Throws ProviderError listing missing legs, or
// ValidationError naming a pair whose carless population is stranded.
DissimilarityMatrix build_dissimilarity_matrix(std::span<const Facility> facilities,
                                               const CountyTable& counties,
                                               const NeighborGraph& graph,
                                               const TravelCache& cache, Scenario scenario);

// Fetches missing legs through the provider, then assembles.
DissimilarityMatrix build_dissimilarity_matrix(std::span<const Facility> facilities,
                                               const CountyTable& counties,
                                               const NeighborGraph& graph,
                                               const RoutingProvider& provider, TravelCache& cache,
                                               Scenario scenario);

// dissimilarity.csv: `id_a,id_b,minutes`, id_a < id_b, rows sorted.
void write_matrix_csv(std::ostream& out, const DissimilarityMatrix& matrix);

} // namespace coverage_ph
