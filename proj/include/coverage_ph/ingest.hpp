#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coverage_ph {

enum class FacilityKind { PPHC, FQHC };

std::string_view to_string(FacilityKind kind);
FacilityKind parse_facility_kind(std::string_view token);

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

struct Facility {
    std::string id;
    std::string name;
    FacilityKind kind = FacilityKind::FQHC;
    double lat = 0.0;
    double lon = 0.0;
    std::string county;

    LatLon position() const { return {lat, lon}; }
};

struct CountyStats {
    std::string county;
    std::int64_t population = 0;
    std::int64_t registered_vehicles = 0;
};

// County table keyed by normalized name (trimmed, lower-cased).
class CountyTable {
public:
    void insert(CountyStats stats);
    bool contains(std::string_view county) const;
    const CountyStats& at(std::string_view county) const;
    std::size_t size() const { return by_key_.size(); }
    const std::map<std::string, CountyStats>& entries() const { return by_key_; }

private:
    std::map<std::string, CountyStats> by_key_;
};

std::string normalize_county_key(std::string_view county);

// facilities.csv: header `id,name,kind,lat,lon,county`. Fields may be
// double-quoted; rows keep input order.
std::vector<Facility> parse_facilities(std::istream& in);
CountyTable parse_counties(std::istream& in);

void write_facilities(std::ostream& out, std::span<const Facility> facilities);
void write_counties(std::ostream& out, const CountyTable& counties);

// Throws ValidationError naming the first facility whose county is missing.
void check_counties_resolvable(std::span<const Facility> facilities, const CountyTable& counties);

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr std::size_t kDefaultNeighborCount = 35;

double haversine_km(LatLon a, LatLon b);

// Directed k-nearest-neighbor lists by great-circle distance. Ties are broken
// by ascending facility id.
struct NeighborGraph {
    std::size_t k = 0;
    std::vector<std::vector<std::size_t>> adjacency;
};

NeighborGraph k_nearest(std::span<const Facility> facilities, std::size_t k);

} // namespace coverage_ph
