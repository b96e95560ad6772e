#include "coverage_ph/traveltime.hpp"

#include "coverage_ph/error.hpp"
#include "csv.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <thread>
#include <tuple>

namespace coverage_ph {

std::string_view to_string(Mode mode) {
    switch (mode) {
    case Mode::Car: return "car";
    case Mode::Transit: return "transit";
    case Mode::Walk: return "walk";
    }
    return "car";
}

Mode parse_mode(std::string_view token) {
    if (token == "car") return Mode::Car;
    if (token == "transit") return Mode::Transit;
    if (token == "walk") return Mode::Walk;
    throw ValidationError("unknown travel mode '" + std::string(token) + "'");
}

std::optional<double>& ModeTimes::operator[](Mode m) {
    switch (m) {
    case Mode::Car: return car;
    case Mode::Transit: return transit;
    case Mode::Walk: break;
    }
    return walk;
}

const std::optional<double>& ModeTimes::operator[](Mode m) const {
    return const_cast<ModeTimes&>(*this)[m];
}

double SyntheticSpeeds::for_mode(Mode mode) const {
    switch (mode) {
    case Mode::Car: return car_kmh;
    case Mode::Transit: return transit_kmh;
    case Mode::Walk: break;
    }
    return walk_kmh;
}

double synthetic_mode_time(LatLon a, LatLon b, Mode mode, const SyntheticSpeeds& speeds) {
    return haversine_km(a, b) / speeds.for_mode(mode) * 60.0;
}

SyntheticProvider::SyntheticProvider(SyntheticSpeeds speeds) : speeds_(speeds) {
    for (Mode m : kAllModes) {
        if (!(speeds_.for_mode(m) > 0.0) || !std::isfinite(speeds_.for_mode(m))) {
            throw ValidationError("synthetic speed for " + std::string(to_string(m)) +
                                  " must be positive");
        }
    }
}

std::optional<double> SyntheticProvider::duration_seconds(LatLon origin, LatLon dest,
                                                          Mode mode) const {
    return synthetic_mode_time(origin, dest, mode, speeds_) * 60.0;
}

// ---------------------------------------------------------------------------
// TravelCache

TravelCache::TravelCache(const TravelCache& other) {
    std::lock_guard lock(other.mutex_);
    entries_ = other.entries_;
}

TravelCache& TravelCache::operator=(const TravelCache& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    entries_ = other.entries_;
    return *this;
}

std::optional<CacheEntry> TravelCache::lookup(const CacheKey& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

bool TravelCache::contains(const CacheKey& key) const {
    std::lock_guard lock(mutex_);
    return entries_.count(key) != 0;
}

void TravelCache::record(const CacheKey& key, CacheEntry entry) {
    if (entry.seconds && (!std::isfinite(*entry.seconds) || *entry.seconds < 0.0)) {
        throw ProviderError("invalid duration for " + key.origin + "->" + key.dest + "/" +
                            std::string(to_string(key.mode)));
    }
    std::lock_guard lock(mutex_);
    auto [it, inserted] = entries_.try_emplace(key, entry);
    if (inserted) return;
    if (it->second.seconds != entry.seconds) {
        throw ProviderError("conflicting cache values for " + key.origin + "->" + key.dest + "/" +
                            std::string(to_string(key.mode)));
    }
}

std::size_t TravelCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

void TravelCache::load(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
            CacheKey key{rec.at("o").get<std::string>(), rec.at("d").get<std::string>(),
                         parse_mode(rec.at("mode").get<std::string>())};
            CacheEntry entry;
            if (!rec.at("seconds").is_null()) entry.seconds = rec.at("seconds").get<double>();
            entry.provider = rec.value("provider", "");
            entry.fetched = rec.value("fetched", "");
            record(key, std::move(entry));
        } catch (const nlohmann::json::exception& e) {
            throw ProviderError("travel cache line " + std::to_string(line_no) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ProviderError("travel cache line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void TravelCache::save(std::ostream& out) const {
    std::lock_guard lock(mutex_);
    for (const auto& [key, entry] : entries_) {
        nlohmann::ordered_json rec;
        rec["o"] = key.origin;
        rec["d"] = key.dest;
        rec["mode"] = to_string(key.mode);
        if (entry.seconds) {
            rec["seconds"] = *entry.seconds;
        } else {
            rec["seconds"] = nullptr;
        }
        rec["provider"] = entry.provider;
        rec["fetched"] = entry.fetched;
        out << rec.dump() << '\n';
    }
}

TravelCache TravelCache::load_file(const std::string& path) {
    TravelCache cache;
    std::ifstream in(path);
    if (in) cache.load(in);
    return cache;
}

void TravelCache::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ProviderError("cannot write travel cache " + path);
    save(out);
}

std::string utc_timestamp_now() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Legs and formulas

namespace {

std::string leg_label(const CacheKey& key) {
    return key.origin + "->" + key.dest + "/" + std::string(to_string(key.mode));
}

std::optional<double> to_minutes(const std::optional<double>& seconds) {
    if (!seconds) return std::nullopt;
    return *seconds / 60.0;
}

} // namespace

std::optional<double> fetch_one_way(const RoutingProvider& provider, TravelCache& cache,
                                    const Facility& origin, const Facility& dest, Mode mode,
                                    RetryPolicy retry) {
    CacheKey key{origin.id, dest.id, mode};
    if (auto hit = cache.lookup(key)) return to_minutes(hit->seconds);

    const int attempts = std::max(1, retry.attempts);
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0 && retry.backoff_ms > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(retry.backoff_ms << (attempt - 1)));
        }
        try {
            auto seconds = provider.duration_seconds(origin.position(), dest.position(), mode);
            cache.record(key, CacheEntry{seconds, provider.name(), utc_timestamp_now()});
            return to_minutes(seconds);
        } catch (const ProviderError& e) {
            last_error = e.what();
        }
    }
    throw ProviderError(leg_label(key) + ": " + last_error);
}

std::optional<double> round_trip_mode_time(const Facility& x, const Facility& y,
                                           const TravelCache& cache, Mode mode) {
    CacheKey out{x.id, y.id, mode};
    CacheKey back{y.id, x.id, mode};
    auto a = cache.lookup(out);
    if (!a) throw ProviderError("missing travel leg " + leg_label(out));
    auto b = cache.lookup(back);
    if (!b) throw ProviderError("missing travel leg " + leg_label(back));
    if (!a->seconds || !b->seconds) return std::nullopt;
    return *a->seconds / 60.0 + *b->seconds / 60.0;
}

ModeTimes round_trip_times(const Facility& x, const Facility& y, const TravelCache& cache) {
    ModeTimes t;
    for (Mode m : kAllModes) t[m] = round_trip_mode_time(x, y, cache, m);
    return t;
}

double vehicle_access_ratio(const CountyStats& county) {
    if (county.population <= 0) {
        throw ValidationError("county " + county.county + ": population must be positive");
    }
    double v = static_cast<double>(county.registered_vehicles) /
               static_cast<double>(county.population);
    return std::clamp(v, 0.0, 1.0);
}

double origin_weighted_time(const ModeTimes& t, double access_ratio) {
    std::optional<double> carless;
    for (const auto& opt : {t.transit, t.walk}) {
        if (opt) carless = carless ? std::min(*carless, *opt) : *opt;
    }
    if (!carless) throw ValidationError("carless population stranded: no transit or walk route");
    double any = t.car ? std::min(*t.car, *carless) : *carless;
    return access_ratio * any + (1.0 - access_ratio) * *carless;
}

double symmetrized_dissimilarity(double d_xy, double d_yx, double population_x,
                                 double population_y) {
    const double total = population_x + population_y;
    return (population_x * d_xy + population_y * d_yx) / total;
}

double symmetrized_dissimilarity(const Facility& x, const Facility& y, double d_xy, double d_yx,
                                 const CountyTable& counties) {
    auto px = static_cast<double>(counties.at(x.county).population);
    auto py = static_cast<double>(counties.at(y.county).population);
    return symmetrized_dissimilarity(d_xy, d_yx, px, py);
}

// ---------------------------------------------------------------------------
// Scenarios and matrices

std::string_view to_string(Scenario scenario) {
    return scenario == Scenario::All ? "all" : "fqhc";
}

Scenario parse_scenario(std::string_view token) {
    if (token == "all" || token == "ALL") return Scenario::All;
    if (token == "fqhc" || token == "FQHC_ONLY" || token == "fqhc_only") return Scenario::FqhcOnly;
    throw ValidationError("unknown scenario '" + std::string(token) + "'");
}

std::vector<Facility> scenario_facilities(std::span<const Facility> facilities, Scenario scenario) {
    std::vector<Facility> out;
    for (const auto& f : facilities) {
        if (scenario == Scenario::All || f.kind == FacilityKind::FQHC) out.push_back(f);
    }
    return out;
}

NeighborGraph scenario_graph(std::span<const Facility> all, std::span<const Facility> subset,
                             std::size_t k, NeighborMode mode) {
    if (mode == NeighborMode::Recompute) return k_nearest(subset, k);

    std::map<std::string, std::size_t, std::less<>> subset_index;
    for (std::size_t i = 0; i < subset.size(); ++i) subset_index.emplace(subset[i].id, i);
    NeighborGraph full = k_nearest(all, k);
    NeighborGraph graph;
    graph.k = k;
    graph.adjacency.resize(subset.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        auto from = subset_index.find(all[i].id);
        if (from == subset_index.end()) continue;
        for (std::size_t j : full.adjacency[i]) {
            auto to = subset_index.find(all[j].id);
            if (to != subset_index.end()) graph.adjacency[from->second].push_back(to->second);
        }
    }
    return graph;
}

std::vector<IndexPair> neighbor_pairs(const NeighborGraph& graph) {
    std::set<IndexPair> pairs;
    for (std::size_t i = 0; i < graph.adjacency.size(); ++i) {
        for (std::size_t j : graph.adjacency[i]) {
            if (i != j) pairs.emplace(std::min(i, j), std::max(i, j));
        }
    }
    return {pairs.begin(), pairs.end()};
}

std::optional<double> DissimilarityMatrix::at(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    auto it = entries.find({std::min(i, j), std::max(i, j)});
    if (it == entries.end()) return std::nullopt;
    return it->second;
}

void DissimilarityMatrix::set(std::size_t i, std::size_t j, double minutes) {
    if (i == j || i >= n() || j >= n()) throw InternalError("invalid matrix index pair");
    if (!(minutes >= 0.0) || !std::isfinite(minutes)) {
        throw ValidationError("dissimilarity must be finite and non-negative");
    }
    entries[{std::min(i, j), std::max(i, j)}] = minutes;
}

FetchSummary fetch_legs(std::span<const Facility> facilities, std::span<const IndexPair> pairs,
                        const RoutingProvider& provider, TravelCache& cache,
                        std::size_t max_in_flight, RetryPolicy retry) {
    struct Task {
        std::size_t origin;
        std::size_t dest;
        Mode mode;
    };
    FetchSummary summary;
    std::vector<Task> tasks;
    std::set<CacheKey> queued;
    for (auto [i, j] : pairs) {
        for (auto [o, d] : {IndexPair{i, j}, IndexPair{j, i}}) {
            for (Mode m : kAllModes) {
                CacheKey key{facilities[o].id, facilities[d].id, m};
                if (!queued.insert(key).second) continue;
                if (cache.contains(key)) {
                    ++summary.cached;
                } else {
                    tasks.push_back({o, d, m});
                }
            }
        }
    }
    if (tasks.empty()) return summary;

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> fetched{0};
    std::atomic<std::size_t> absent{0};
    std::mutex failures_mutex;
    std::vector<std::pair<std::size_t, std::string>> failures;

    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            const auto& task = tasks[t];
            try {
                auto minutes = fetch_one_way(provider, cache, facilities[task.origin],
                                             facilities[task.dest], task.mode, retry);
                ++fetched;
                if (!minutes) ++absent;
            } catch (const std::exception& e) {
                std::lock_guard lock(failures_mutex);
                failures.emplace_back(t, e.what());
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(max_in_flight, 1, tasks.size());
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    std::sort(failures.begin(), failures.end());
    summary.fetched = fetched;
    summary.absent = absent;
    for (auto& [t, msg] : failures) summary.failures.push_back(std::move(msg));
    return summary;
}

std::vector<std::string> missing_legs(std::span<const Facility> facilities,
                                      std::span<const IndexPair> pairs, const TravelCache& cache) {
    std::vector<std::string> missing;
    for (auto [i, j] : pairs) {
        for (auto [o, d] : {IndexPair{i, j}, IndexPair{j, i}}) {
            for (Mode m : kAllModes) {
                CacheKey key{facilities[o].id, facilities[d].id, m};
                if (!cache.contains(key)) missing.push_back(leg_label(key));
            }
        }
    }
    return missing;
}

DissimilarityMatrix build_dissimilarity_matrix(std::span<const Facility> facilities,
                                               const CountyTable& counties,
                                               const NeighborGraph& graph,
                                               const TravelCache& cache, Scenario scenario) {
    if (graph.adjacency.size() != facilities.size()) {
        throw InternalError("neighbor graph does not match facility list");
    }
    check_counties_resolvable(facilities, counties);
    if (scenario == Scenario::FqhcOnly) {
        for (const auto& f : facilities) {
            if (f.kind != FacilityKind::FQHC) {
                throw ValidationError("FQHC-only matrix given non-FQHC facility " + f.id);
            }
        }
    }
    auto pairs = neighbor_pairs(graph);
    if (auto missing = missing_legs(facilities, pairs, cache); !missing.empty()) {
        std::string msg = "travel cache incomplete: " + std::to_string(missing.size()) +
                          " missing legs:";
        const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
        for (std::size_t i = 0; i < shown; ++i) msg += " " + missing[i];
        if (shown < missing.size()) msg += " ...";
        throw ProviderError(msg);
    }

    DissimilarityMatrix matrix;
    matrix.scenario = scenario;
    for (const auto& f : facilities) matrix.ids.push_back(f.id);
    for (auto [i, j] : pairs) {
        const Facility& x = facilities[i];
        const Facility& y = facilities[j];
        ModeTimes t = round_trip_times(x, y, cache);
        double d_xy = 0.0;
        double d_yx = 0.0;
        try {
            d_xy = origin_weighted_time(t, vehicle_access_ratio(counties.at(x.county)));
            d_yx = origin_weighted_time(t, vehicle_access_ratio(counties.at(y.county)));
        } catch (const ValidationError& e) {
            throw ValidationError("pair " + x.id + "," + y.id + ": " + e.what());
        }
        matrix.set(i, j, symmetrized_dissimilarity(x, y, d_xy, d_yx, counties));
    }
    return matrix;
}

DissimilarityMatrix build_dissimilarity_matrix(std::span<const Facility> facilities,
                                               const CountyTable& counties,
                                               const NeighborGraph& graph,
                                               const RoutingProvider& provider, TravelCache& cache,
                                               Scenario scenario) {
    auto pairs = neighbor_pairs(graph);
    auto summary = fetch_legs(facilities, pairs, provider, cache);
    if (!summary.failures.empty()) {
        throw ProviderError(std::to_string(summary.failures.size()) +
                            " fetch failures, first: " + summary.failures.front());
    }
    return build_dissimilarity_matrix(facilities, counties, graph, cache, scenario);
}

void write_matrix_csv(std::ostream& out, const DissimilarityMatrix& matrix) {
    std::vector<std::tuple<std::string, std::string, double>> rows;
    rows.reserve(matrix.entries.size());
    for (const auto& [key, minutes] : matrix.entries) {
        auto a = matrix.ids[key.first];
        auto b = matrix.ids[key.second];
        if (b < a) std::swap(a, b);
        rows.emplace_back(std::move(a), std::move(b), minutes);
    }
    std::sort(rows.begin(), rows.end());
    out << "id_a,id_b,minutes\n";
    for (const auto& [a, b, minutes] : rows) {
        out << detail::csv_field(a) << ',' << detail::csv_field(b) << ','
            << detail::format_double(minutes) << '\n';
    }
}

} // namespace coverage_ph
