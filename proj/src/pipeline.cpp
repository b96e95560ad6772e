#include "coverage_ph/pipeline.hpp"

#include "coverage_ph/error.hpp"
#include "csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <set>

namespace coverage_ph {

namespace fs = std::filesystem;

namespace {

std::string unquote(std::string_view raw) {
    auto v = detail::trim(raw);
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
        return std::string(v.substr(1, v.size() - 2));
    }
    return std::string(v);
}

// Drops a trailing `# comment` that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

double to_number(const std::string& key, const std::string& value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out)) {
        throw ValidationError("config: '" + key + "' expects a number, got '" + value + "'");
    }
    return out;
}

std::size_t to_count(const std::string& key, const std::string& value) {
    double d = to_number(key, value);
    if (d < 0.0 || d != std::floor(d)) {
        throw ValidationError("config: '" + key + "' expects a non-negative integer");
    }
    return static_cast<std::size_t>(d);
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ValidationError("config: '" + key + "' expects true or false");
}

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p(value);
    if (p.is_relative() && !base.empty()) return base / p;
    return p;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    writer(out);
}

std::string minutes(const std::optional<double>& v) {
    if (!v) return "n/a";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << *v << " min";
    return os.str();
}

std::vector<Scenario> selected_scenarios(const RunConfig& config) {
    if (config.scenario) return {*config.scenario};
    return {Scenario::All, Scenario::FqhcOnly};
}

} // namespace

ProviderKind parse_provider_kind(std::string_view token) {
    if (token == "synthetic") return ProviderKind::Synthetic;
    if (token == "live") return ProviderKind::Live;
    throw ValidationError("unknown provider '" + std::string(token) + "'");
}

void RunConfig::validate() const {
    if (facilities.empty()) throw ValidationError("config: facilities path is required");
    if (counties.empty()) throw ValidationError("config: counties path is required");
    if (k < 1) throw ValidationError("config: k must be at least 1");
    if (!(trim_minutes >= 0.0)) throw ValidationError("config: trim must be non-negative");
    if (!(death_filter_minutes >= 0.0)) {
        throw ValidationError("config: death_filter must be non-negative");
    }
    if (concurrency < 1) throw ValidationError("config: concurrency must be at least 1");
    for (Mode m : kAllModes) {
        if (!(speeds.for_mode(m) > 0.0)) {
            throw ValidationError("config: speed for " + std::string(to_string(m)) + " must be positive");
        }
    }
    if (provider == ProviderKind::Live) {
        const char* key = std::getenv(std::string(RoutesApiProvider::kApiKeyEnv).c_str());
        if (key == nullptr || *key == '\0') {
            throw ValidationError("live provider requires " + std::string(RoutesApiProvider::kApiKeyEnv));
        }
    }
}

RunConfig parse_config(std::istream& in, const fs::path& base_dir) {
    RunConfig config;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto text = detail::trim(strip_comment(line));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']') throw ValidationError("config line " + std::to_string(line_no) + ": bad section");
            section = std::string(detail::trim(text.substr(1, text.size() - 2)));
            continue;
        }
        auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key(detail::trim(text.substr(0, eq)));
        if (!section.empty()) key = section + "." + key;
        std::string value = unquote(text.substr(eq + 1));

        if (key == "facilities") {
            config.facilities = resolve(base_dir, value);
        } else if (key == "counties") {
            config.counties = resolve(base_dir, value);
        } else if (key == "cache") {
            config.cache = resolve(base_dir, value);
        } else if (key == "output_dir") {
            config.output_dir = resolve(base_dir, value);
        } else if (key == "provider") {
            config.provider = parse_provider_kind(value);
        } else if (key == "k") {
            config.k = to_count(key, value);
        } else if (key == "trim") {
            config.trim_minutes = to_number(key, value);
        } else if (key == "death_filter") {
            config.death_filter_minutes = to_number(key, value);
        } else if (key == "scenario") {
            if (value == "both") {
                config.scenario.reset();
            } else {
                config.scenario = parse_scenario(value);
            }
        } else if (key == "speeds.car" || key == "speed_car") {
            config.speeds.car_kmh = to_number(key, value);
        } else if (key == "speeds.transit" || key == "speed_transit") {
            config.speeds.transit_kmh = to_number(key, value);
        } else if (key == "speeds.walk" || key == "speed_walk") {
            config.speeds.walk_kmh = to_number(key, value);
        } else if (key == "concurrency") {
            config.concurrency = to_count(key, value);
        } else if (key == "neighbor_mode") {
            if (value == "recompute") {
                config.neighbor_mode = NeighborMode::Recompute;
            } else if (value == "induced") {
                config.neighbor_mode = NeighborMode::Induced;
            } else {
                throw ValidationError("config: neighbor_mode must be recompute or induced");
            }
        } else if (key == "death_dims") {
            config.death_selection = parse_death_selection(value);
        } else if (key == "api_url") {
            config.api_url = value;
        } else if (key == "dump_filtration") {
            config.dump_filtration = to_bool(key, value);
        } else {
            throw ValidationError("config: unknown key '" + key + "'");
        }
    }
    return config;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config " + path.string());
    return parse_config(in, path.parent_path());
}

Dataset load_dataset(const RunConfig& config) {
    Dataset data;
    std::ifstream fin(config.facilities);
    if (!fin) throw ValidationError("cannot open facilities file " + config.facilities.string());
    data.facilities = parse_facilities(fin);
    std::ifstream cin(config.counties);
    if (!cin) throw ValidationError("cannot open counties file " + config.counties.string());
    data.counties = parse_counties(cin);
    check_counties_resolvable(data.facilities, data.counties);
    return data;
}

ScenarioInput prepare_scenario(const Dataset& data, Scenario scenario, const RunConfig& config) {
    ScenarioInput input;
    input.scenario = scenario;
    input.facilities = scenario_facilities(data.facilities, scenario);
    if (input.facilities.size() < 2) {
        throw ValidationError("scenario " + std::string(to_string(scenario)) +
                              " has fewer than 2 facilities");
    }
    input.graph = scenario_graph(data.facilities, input.facilities, config.k, config.neighbor_mode);
    return input;
}

std::unique_ptr<RoutingProvider> make_provider(const RunConfig& config) {
    if (config.provider == ProviderKind::Live) {
        return std::make_unique<RoutesApiProvider>(RoutesApiProvider::from_environment(config.api_url));
    }
    return std::make_unique<SyntheticProvider>(config.speeds);
}

FetchSummary cmd_fetch(const RunConfig& config, std::ostream& log) {
    config.validate();
    auto provider = make_provider(config);
    return cmd_fetch(config, *provider, log);
}

FetchSummary cmd_fetch(const RunConfig& config, const RoutingProvider& provider, std::ostream& log) {
    config.validate();
    auto data = load_dataset(config);
    auto cache = TravelCache::load_file(config.cache.string());

    // Pairs keyed by facility ids so scenarios sharing legs are fetched once.
    std::vector<Facility> union_facilities;
    std::map<std::string, std::size_t, std::less<>> index;
    std::set<IndexPair> pairs;
    for (Scenario s : selected_scenarios(config)) {
        auto input = prepare_scenario(data, s, config);
        for (auto [i, j] : neighbor_pairs(input.graph)) {
            auto slot = [&](const Facility& f) {
                auto [it, inserted] = index.emplace(f.id, union_facilities.size());
                if (inserted) union_facilities.push_back(f);
                return it->second;
            };
            auto a = slot(input.facilities[i]);
            auto b = slot(input.facilities[j]);
            pairs.emplace(std::min(a, b), std::max(a, b));
        }
    }
    std::vector<IndexPair> pair_list(pairs.begin(), pairs.end());
    auto summary = fetch_legs(union_facilities, pair_list, provider, cache, config.concurrency);
    cache.save_file(config.cache.string());

    log << summary.fetched << " fetched, " << summary.cached << " cached";
    if (summary.absent) log << ", " << summary.absent << " without route";
    log << '\n';
    for (const auto& f : summary.failures) log << "failed: " << f << '\n';
    if (!summary.failures.empty()) {
        throw ProviderError(std::to_string(summary.failures.size()) +
                            " legs failed; partial cache saved to " + config.cache.string());
    }
    return summary;
}

AnalyzeResult cmd_analyze(const RunConfig& config, Scenario scenario, std::ostream& log) {
    auto data = load_dataset(config);
    auto cache = TravelCache::load_file(config.cache.string());
    auto input = prepare_scenario(data, scenario, config);

    AnalyzeResult result;
    result.scenario = scenario;
    result.matrix = build_dissimilarity_matrix(input.facilities, data.counties, input.graph, cache, scenario);
    auto edges = build_edges(result.matrix);
    auto triangles = build_triangles(edges, result.matrix.n());
    result.edge_count = edges.size();
    result.triangle_count = triangles.size();
    auto filtration = assemble_filtration(result.matrix.n(), std::move(edges), std::move(triangles));
    const std::string label(to_string(scenario));
    result.diagram = compute_diagram(filtration, label);
    result.death_features =
        extract_death_simplices(result.diagram.pairs, input.facilities, config.death_filter_minutes);

    fs::create_directories(config.output_dir);
    const auto& dir = config.output_dir;
    write_file(dir / ("dissimilarity_" + label + ".csv"),
               [&](std::ostream& out) { write_matrix_csv(out, result.matrix); });
    write_file(dir / ("pairs_" + label + ".csv"), [&](std::ostream& out) {
        write_pairs_csv(out, result.diagram.pairs, result.matrix.ids);
    });
    write_text(dir / ("deaths_" + label + ".geojson"),
               death_geojson(result.death_features).dump(2) + "\n");
    write_file(dir / ("diagram_" + label + ".svg"),
               [&](std::ostream& out) { write_diagram_svg(out, result.diagram); });
    if (config.dump_filtration) {
        write_file(dir / ("filtration_" + label + ".csv"),
                   [&](std::ostream& out) { write_filtration_csv(out, filtration); });
    }

    const auto& s = result.diagram.summary;
    log << "scenario " << label << ": " << result.matrix.n() << " facilities, " << result.edge_count
        << " edges, " << result.triangle_count << " triangles\n";
    for (int d = 0; d < 2; ++d) {
        log << "H" << d << ": " << s.count[d] << " pairs (" << s.finite[d] << " finite, "
            << s.essential[d] << " essential), mean finite death " << minutes(s.mean_death[d]) << '\n';
    }
    log << "pooled mean finite death: " << minutes(s.pooled_mean_death) << '\n';
    log << "connectivity horizon (max finite H0 death): " << minutes(s.connectivity_horizon) << '\n';
    if (s.essential[1] > 0) {
        log << "note: " << s.essential[1] << " H1 classes never fill within the sparse neighbor complex\n";
    }
    log << "death simplices >= " << minutes(config.death_filter_minutes) << ": "
        << result.death_features.size() << '\n';
    return result;
}

SignificanceReport cmd_compare(const RunConfig& config, std::ostream& log) {
    auto all = cmd_analyze(config, Scenario::All, log);
    auto fqhc = cmd_analyze(config, Scenario::FqhcOnly, log);

    auto sample_for = [&](const AnalyzeResult& r) {
        const std::string label(to_string(r.scenario));
        auto deaths = finite_deaths(r.diagram.pairs, config.death_selection);
        Sample trimmed;
        try {
            trimmed = trim_short_deaths(deaths, config.trim_minutes, label);
        } catch (const ValidationError& e) {
            throw ValidationError("scenario " + label + ": " + e.what());
        }
        if (trimmed.values.size() < 2) {
            throw ValidationError("scenario " + label + ": fewer than 2 deaths above the trim threshold");
        }
        double sum = 0.0;
        for (double d : trimmed.values) sum += d;
        log << "scenario " << label << ": " << trimmed.values.size() << " " << to_string(config.death_selection)
            << " deaths above " << minutes(config.trim_minutes) << ", mean "
            << minutes(sum / static_cast<double>(trimmed.values.size())) << '\n';
        return trimmed;
    };
    auto a = log_transform(sample_for(all));
    auto b = log_transform(sample_for(fqhc));

    SignificanceReport report;
    report.scenario_a = std::string(to_string(Scenario::All));
    report.scenario_b = std::string(to_string(Scenario::FqhcOnly));
    report.n_a = a.values.size();
    report.n_b = b.values.size();
    report.trim_threshold = config.trim_minutes;
    report.tests.push_back(mann_whitney_one_sided(a, b, Alternative::Less));
    report.tests.push_back(brunner_munzel_one_sided(a, b, Alternative::Less));
    for (auto& t : report.tests) t.alternative = "all-locations deaths stochastically less than FQHC-only deaths";

    fs::create_directories(config.output_dir);
    write_text(config.output_dir / "significance_report.json", to_json(report).dump(2) + "\n");
    for (const auto& t : report.tests) {
        log << t.name << ": statistic " << t.statistic << ", one-tailed p " << t.p_one_tailed << '\n';
    }
    return report;
}

} // namespace coverage_ph
