#include "coverage_ph/export.hpp"

#include "csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace coverage_ph {

namespace {

std::string join_ids(std::span<const VertexId> vertices, std::span<const std::string> ids) {
    std::string out;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (i) out += ';';
        out += ids[vertices[i]];
    }
    return out;
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

nlohmann::ordered_json position(const LatLon& p) { return nlohmann::ordered_json::array({p.lon, p.lat}); }

} // namespace

void write_pairs_csv(std::ostream& out, std::span<const PersistencePair> pairs,
                     std::span<const std::string> ids) {
    out << "dim,birth,death,birth_vertices,death_vertices\n";
    for (const auto& p : pairs) {
        out << p.dim << ',' << detail::format_double(p.birth) << ','
            << detail::format_double(p.death) << ','
            << detail::csv_field(join_ids(p.birth_simplex, ids)) << ','
            << detail::csv_field(join_ids(p.death_simplex, ids)) << '\n';
    }
}

nlohmann::ordered_json death_geojson(std::span<const DeathFeature> features) {
    nlohmann::ordered_json collection;
    collection["type"] = "FeatureCollection";
    collection["features"] = nlohmann::ordered_json::array();
    for (const auto& f : features) {
        nlohmann::ordered_json geometry;
        auto coords = nlohmann::ordered_json::array();
        for (const auto& c : f.coordinates) coords.push_back(position(c));
        if (f.dim == 0) {
            geometry["type"] = "LineString";
            geometry["coordinates"] = coords;
        } else {
            coords.push_back(position(f.coordinates.front()));
            geometry["type"] = "Polygon";
            geometry["coordinates"] = nlohmann::ordered_json::array({coords});
        }
        nlohmann::ordered_json feature;
        feature["type"] = "Feature";
        feature["geometry"] = std::move(geometry);
        feature["properties"] = {{"dim", f.dim},
                                 {"birth", f.birth},
                                 {"death", f.death},
                                 {"facilities", f.ids}};
        collection["features"].push_back(std::move(feature));
    }
    return collection;
}

void write_diagram_svg(std::ostream& out, const Diagram& diagram) {
    constexpr double kSize = 480.0;
    constexpr double kMargin = 50.0;
    constexpr double kPlot = kSize - 2.0 * kMargin;
    constexpr double kBand = 18.0;  // essential classes sit above the plot area

    double max_value = 0.0;
    for (const auto& p : diagram.pairs) {
        max_value = std::max(max_value, p.birth);
        if (!p.essential()) max_value = std::max(max_value, p.death);
    }
    if (max_value <= 0.0) max_value = 1.0;
    max_value *= 1.05;
    auto sx = [&](double v) { return kMargin + v / max_value * kPlot; };
    auto sy = [&](double v) { return kSize - kMargin - v / max_value * kPlot; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
        << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n";
    out << "<title>" << diagram.label << " persistence diagram</title>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << fixed(sx(0)) << "\" y1=\"" << fixed(sy(0)) << "\" x2=\"" << fixed(sx(max_value))
        << "\" y2=\"" << fixed(sy(max_value)) << "\" stroke=\"gray\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kSize - kMargin << "\" x2=\"" << kSize - kMargin
        << "\" y2=\"" << kSize - kMargin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kSize - kMargin << "\" x2=\"" << kMargin
        << "\" y2=\"" << kMargin - kBand << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 12 << "\" text-anchor=\"middle\" "
           "font-size=\"12\">birth (minutes)</text>\n";
    out << "<text x=\"14\" y=\"" << kSize / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
           "transform=\"rotate(-90 14 "
        << kSize / 2 << ")\">death (minutes)</text>\n";
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << fixed(kMargin - kBand + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">inf</text>\n";
    out << "<text x=\"" << kSize - kMargin << "\" y=\"" << kSize - kMargin + 14
        << "\" text-anchor=\"end\" font-size=\"10\">" << fixed(max_value) << "</text>\n";

    if (diagram.summary.pooled_mean_death) {
        const double y = sy(*diagram.summary.pooled_mean_death);
        out << "<line class=\"mean-death\" x1=\"" << kMargin << "\" y1=\"" << fixed(y) << "\" x2=\""
            << kSize - kMargin << "\" y2=\"" << fixed(y)
            << "\" stroke=\"purple\" stroke-dasharray=\"2,3\"/>\n";
    }

    for (const auto& p : diagram.pairs) {
        const double x = sx(p.birth);
        const double y = p.essential() ? kMargin - kBand : sy(p.death);
        if (p.dim == 0) {
            out << "<circle class=\"h0\" cx=\"" << fixed(x) << "\" cy=\"" << fixed(y)
                << "\" r=\"3\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n";
        } else {
            out << "<path class=\"h1\" d=\"M" << fixed(x) << ' ' << fixed(y - 4) << " L" << fixed(x - 4)
                << ' ' << fixed(y + 3) << " L" << fixed(x + 4) << ' ' << fixed(y + 3)
                << " Z\" fill=\"darkorange\" fill-opacity=\"0.8\"/>\n";
        }
    }
    out << "<text x=\"" << kSize - kMargin << "\" y=\"" << kMargin - kBand - 14
        << "\" text-anchor=\"end\" font-size=\"11\">"
        << "<tspan fill=\"steelblue\">H0</tspan> <tspan fill=\"darkorange\">H1</tspan></text>\n";
    out << "</svg>\n";
}

nlohmann::ordered_json to_json(const SignificanceReport& report) {
    nlohmann::ordered_json doc;
    doc["scenario_a"] = report.scenario_a;
    doc["scenario_b"] = report.scenario_b;
    doc["n_a"] = report.n_a;
    doc["n_b"] = report.n_b;
    doc["trim_threshold"] = report.trim_threshold;
    doc["tests"] = nlohmann::ordered_json::array();
    for (const auto& t : report.tests) {
        nlohmann::ordered_json entry;
        entry["name"] = t.name;
        // JSON has no infinity; a fully separated Brunner-Munzel statistic is written as null.
        if (std::isfinite(t.statistic)) {
            entry["statistic"] = t.statistic;
        } else {
            entry["statistic"] = nullptr;
        }
        entry["p_one_tailed"] = t.p_one_tailed;
        entry["alternative"] = t.alternative;
        doc["tests"].push_back(std::move(entry));
    }
    return doc;
}

} // namespace coverage_ph
