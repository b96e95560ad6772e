#include "coverage_ph/ingest.hpp"

#include "coverage_ph/error.hpp"
#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

namespace coverage_ph {

namespace {

std::string row_label(std::size_t line) { return "row " + std::to_string(line); }

double parse_double(std::string_view field, std::string_view what, std::size_t line) {
    double value = 0.0;
    auto text = detail::trim(field);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw ValidationError(row_label(line) + ": invalid " + std::string(what) + " '" +
                              std::string(field) + "'");
    }
    return value;
}

std::int64_t parse_count(std::string_view field, std::string_view what, std::size_t line) {
    std::int64_t value = 0;
    auto text = detail::trim(field);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ValidationError(row_label(line) + ": invalid " + std::string(what) + " '" +
                              std::string(field) + "'");
    }
    return value;
}

// Maps each expected column name to its position in the header.
std::vector<std::size_t> resolve_header(const std::vector<std::string>& header,
                                        std::span<const std::string_view> expected) {
    std::vector<std::size_t> columns;
    for (auto name : expected) {
        auto it = std::find_if(header.begin(), header.end(),
                               [&](const std::string& h) { return detail::trim(h) == name; });
        if (it == header.end()) {
            throw ValidationError("missing column '" + std::string(name) + "' in header");
        }
        columns.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    return columns;
}

} // namespace

std::string_view to_string(FacilityKind kind) {
    return kind == FacilityKind::PPHC ? "PPHC" : "FQHC";
}

FacilityKind parse_facility_kind(std::string_view token) {
    auto t = detail::trim(token);
    if (t == "PPHC") return FacilityKind::PPHC;
    if (t == "FQHC") return FacilityKind::FQHC;
    throw ValidationError("unknown facility kind '" + std::string(token) + "'");
}

std::string normalize_county_key(std::string_view county) {
    std::string key(detail::trim(county));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return key;
}

void CountyTable::insert(CountyStats stats) {
    auto key = normalize_county_key(stats.county);
    if (key.empty()) throw ValidationError("empty county key");
    if (stats.population <= 0) {
        throw ValidationError("county " + stats.county + ": population must be positive");
    }
    if (stats.registered_vehicles < 0) {
        throw ValidationError("county " + stats.county + ": registered_vehicles must be non-negative");
    }
    auto [it, inserted] = by_key_.emplace(std::move(key), std::move(stats));
    if (!inserted) throw ValidationError("duplicate county " + it->second.county);
}

bool CountyTable::contains(std::string_view county) const {
    return by_key_.count(normalize_county_key(county)) != 0;
}

const CountyStats& CountyTable::at(std::string_view county) const {
    auto it = by_key_.find(normalize_county_key(county));
    if (it == by_key_.end()) throw ValidationError("unknown county '" + std::string(county) + "'");
    return it->second;
}

std::vector<Facility> parse_facilities(std::istream& in) {
    static constexpr std::string_view kColumns[] = {"id", "name", "kind", "lat", "lon", "county"};
    detail::CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw ValidationError("facilities: empty input");
    auto cols = resolve_header(fields, kColumns);

    std::vector<Facility> out;
    std::set<std::string, std::less<>> seen;
    while (reader.next(fields)) {
        auto line = reader.line();
        if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;
        if (fields.size() < 6) throw ValidationError(row_label(line) + ": expected 6 fields");
        Facility f;
        f.id = std::string(detail::trim(fields[cols[0]]));
        f.name = fields[cols[1]];
        try {
            f.kind = parse_facility_kind(fields[cols[2]]);
        } catch (const ValidationError& e) {
            throw ValidationError(row_label(line) + ": " + e.what());
        }
        f.lat = parse_double(fields[cols[3]], "latitude", line);
        f.lon = parse_double(fields[cols[4]], "longitude", line);
        f.county = std::string(detail::trim(fields[cols[5]]));
        if (f.id.empty()) throw ValidationError(row_label(line) + ": empty facility id");
        if (f.lat < -90.0 || f.lat > 90.0) {
            throw ValidationError(row_label(line) + ": latitude out of range");
        }
        if (f.lon < -180.0 || f.lon > 180.0) {
            throw ValidationError(row_label(line) + ": longitude out of range");
        }
        if (!seen.insert(f.id).second) throw ValidationError("duplicate facility id " + f.id);
        out.push_back(std::move(f));
    }
    return out;
}

CountyTable parse_counties(std::istream& in) {
    static constexpr std::string_view kColumns[] = {"county", "population", "registered_vehicles"};
    detail::CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw ValidationError("counties: empty input");
    auto cols = resolve_header(fields, kColumns);

    CountyTable table;
    while (reader.next(fields)) {
        auto line = reader.line();
        if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;
        if (fields.size() < 3) throw ValidationError(row_label(line) + ": expected 3 fields");
        CountyStats stats;
        stats.county = std::string(detail::trim(fields[cols[0]]));
        stats.population = parse_count(fields[cols[1]], "population", line);
        stats.registered_vehicles = parse_count(fields[cols[2]], "registered_vehicles", line);
        table.insert(std::move(stats));
    }
    return table;
}

void write_facilities(std::ostream& out, std::span<const Facility> facilities) {
    out << "id,name,kind,lat,lon,county\n";
    for (const auto& f : facilities) {
        out << detail::csv_field(f.id) << ',' << detail::csv_field(f.name) << ','
            << to_string(f.kind) << ',' << detail::format_double(f.lat) << ','
            << detail::format_double(f.lon) << ',' << detail::csv_field(f.county) << '\n';
    }
}

void write_counties(std::ostream& out, const CountyTable& counties) {
    out << "county,population,registered_vehicles\n";
    for (const auto& [key, c] : counties.entries()) {
        out << detail::csv_field(c.county) << ',' << c.population << ',' << c.registered_vehicles
            << '\n';
    }
}

void check_counties_resolvable(std::span<const Facility> facilities, const CountyTable& counties) {
    for (const auto& f : facilities) {
        if (!counties.contains(f.county)) {
            throw ValidationError("facility " + f.id + ": unknown county '" + f.county + "'");
        }
    }
}

double haversine_km(LatLon a, LatLon b) {
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    const double lat1 = a.lat * kDegToRad;
    const double lat2 = b.lat * kDegToRad;
    const double dlat = lat2 - lat1;
    const double dlon = (b.lon - a.lon) * kDegToRad;
    const double s = std::sin(dlat / 2.0);
    const double t = std::sin(dlon / 2.0);
    double h = s * s + std::cos(lat1) * std::cos(lat2) * t * t;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

NeighborGraph k_nearest(std::span<const Facility> facilities, std::size_t k) {
    const std::size_t n = facilities.size();
    if (n < 2) throw ValidationError("k_nearest requires at least 2 facilities");
    if (k == 0) throw ValidationError("k must be positive");

    NeighborGraph graph;
    graph.k = k;
    graph.adjacency.resize(n);
    const std::size_t take = std::min(k, n - 1);

    std::vector<std::pair<double, std::size_t>> candidates;
    candidates.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        candidates.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            candidates.emplace_back(haversine_km(facilities[i].position(), facilities[j].position()), j);
        }
        auto closer = [&](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first < y.first;
            return facilities[x.second].id < facilities[y.second].id;
        };
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                          candidates.end(), closer);
        auto& list = graph.adjacency[i];
        list.reserve(take);
        for (std::size_t r = 0; r < take; ++r) list.push_back(candidates[r].second);
    }
    return graph;
}

} // namespace coverage_ph
