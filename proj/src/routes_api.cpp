#include <httplib.h>

#include "coverage_ph/error.hpp"
#include "coverage_ph/traveltime.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdlib>

namespace coverage_ph {

namespace {

std::string_view travel_mode_token(Mode mode) {
    switch (mode) {
    case Mode::Car: return "DRIVE";
    case Mode::Transit: return "TRANSIT";
    case Mode::Walk: break;
    }
    return "WALK";
}

nlohmann::json waypoint(LatLon p) {
    return {{"location", {{"latLng", {{"latitude", p.lat}, {"longitude", p.lon}}}}}};
}

} // namespace

std::string routes_request_body(LatLon origin, LatLon dest, Mode mode) {
    nlohmann::ordered_json body;
    body["origin"] = waypoint(origin);
    body["destination"] = waypoint(dest);
    body["travelMode"] = travel_mode_token(mode);
    return body.dump();
}

std::optional<double> parse_routes_response(std::string_view body) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("malformed routes response: ") + e.what());
    }
    auto routes = doc.find("routes");
    if (routes == doc.end() || !routes->is_array() || routes->empty()) return std::nullopt;
    const auto& first = routes->front();
    auto duration = first.find("duration");
    if (duration == first.end() || !duration->is_string()) {
        throw ProviderError("routes response without duration");
    }
    // Durations come as protobuf Duration strings, e.g. "1234s" or "12.5s".
    std::string text = duration->get<std::string>();
    if (text.empty() || text.back() != 's') throw ProviderError("bad duration '" + text + "'");
    double seconds = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size() - 1, seconds);
    if (ec != std::errc{} || ptr != text.data() + text.size() - 1 || seconds < 0.0) {
        throw ProviderError("bad duration '" + text + "'");
    }
    return seconds;
}

RoutesApiProvider::RoutesApiProvider(std::string api_key, std::string base_url,
                                     int timeout_seconds)
    : api_key_(std::move(api_key)), base_url_(std::move(base_url)),
      timeout_seconds_(timeout_seconds) {
    if (api_key_.empty()) throw ValidationError("routing API key is empty");
}

RoutesApiProvider RoutesApiProvider::from_environment(std::string base_url) {
    const char* key = std::getenv(std::string(kApiKeyEnv).c_str());
    if (key == nullptr || *key == '\0') {
        throw ValidationError("live provider requires " + std::string(kApiKeyEnv));
    }
    return RoutesApiProvider(key, std::move(base_url));
}

std::optional<double> RoutesApiProvider::duration_seconds(LatLon origin, LatLon dest,
                                                          Mode mode) const {
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_seconds_);
    client.set_read_timeout(timeout_seconds_);
    httplib::Headers headers{{"X-Goog-Api-Key", api_key_},
                             {"X-Goog-FieldMask", "routes.duration"}};
    auto res = client.Post("/directions/v2:computeRoutes", headers,
                           routes_request_body(origin, dest, mode), "application/json");
    if (!res) throw ProviderError("routes request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) {
        throw ProviderError("routes request returned HTTP " + std::to_string(res->status));
    }
    return parse_routes_response(res->body);
}

} // namespace coverage_ph
