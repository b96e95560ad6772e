#include "coverage_ph/error.hpp"
#include "coverage_ph/ingest.hpp"
#include "coverage_ph/persistence.hpp"
#include "coverage_ph/stats.hpp"
#include "coverage_ph/traveltime.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <tuple>

namespace py = pybind11;
using namespace coverage_ph;

namespace {

Alternative parse_alternative(const std::string& token) {
    if (token == "less") return Alternative::Less;
    if (token == "greater") return Alternative::Greater;
    throw ValidationError("alternative must be 'less' or 'greater'");
}

py::dict result_dict(const TestResult& r) {
    py::dict d;
    d["name"] = r.name;
    d["statistic"] = r.statistic;
    d["p_one_tailed"] = r.p_one_tailed;
    d["exact"] = r.exact;
    d["small_sample"] = r.small_sample;
    return d;
}

ModeTimes mode_times(std::optional<double> car, std::optional<double> transit, std::optional<double> walk) {
    ModeTimes t;
    t[Mode::Car] = car;
    t[Mode::Transit] = transit;
    t[Mode::Walk] = walk;
    return t;
}

// Diagram of the sparse Rips filtration on an explicit edge list.
std::vector<std::tuple<int, double, double>> persistence(
    std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
    DissimilarityMatrix m;
    for (std::size_t i = 0; i < n; ++i) m.ids.push_back(std::to_string(i));
    for (const auto& [a, b, w] : edges) {
        if (a >= n || b >= n || a == b) throw ValidationError("edge endpoint out of range");
        m.set(a, b, w);
    }
    std::vector<std::tuple<int, double, double>> out;
    for (const auto& p : compute_diagram(build_filtration(m), "python").pairs) {
        out.emplace_back(p.dim, p.birth, p.death);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coverage-gap persistent homology core";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ProviderError>(m, "ProviderError", PyExc_RuntimeError);

    m.def("haversine_km",
          [](double lat1, double lon1, double lat2, double lon2) { return haversine_km({lat1, lon1}, {lat2, lon2}); },
          py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"));

    m.def(
        "k_nearest",
        [](const std::vector<std::pair<double, double>>& points, std::size_t k) {
            std::vector<Facility> f;
            for (std::size_t i = 0; i < points.size(); ++i) {
                f.push_back({std::to_string(i), "", FacilityKind::FQHC, points[i].first, points[i].second, ""});
            }
            return k_nearest(f, k).adjacency;
        },
        py::arg("points"), py::arg("k") = kDefaultNeighborCount);

    m.def(
        "vehicle_access_ratio",
        [](std::int64_t population, std::int64_t vehicles) {
            return vehicle_access_ratio(CountyStats{"", population, vehicles});
        },
        py::arg("population"), py::arg("vehicles"));

    m.def(
        "origin_weighted_time",
        [](std::optional<double> car, std::optional<double> transit, std::optional<double> walk, double access_ratio) {
            return origin_weighted_time(mode_times(car, transit, walk), access_ratio);
        },
        py::arg("car"), py::arg("transit"), py::arg("walk"), py::arg("access_ratio"));

    m.def("symmetrized_dissimilarity",
          py::overload_cast<double, double, double, double>(&symmetrized_dissimilarity), py::arg("d_xy"),
          py::arg("d_yx"), py::arg("population_x"), py::arg("population_y"));

    m.def("persistence", &persistence, py::arg("n"), py::arg("edges"),
          "List of (dim, birth, death); death is inf for essential classes.");

    m.def(
        "trim_short_deaths",
        [](const std::vector<double>& deaths, double threshold) { return trim_short_deaths(deaths, threshold).values; },
        py::arg("deaths"), py::arg("threshold") = kDefaultTrimMinutes);

    m.def(
        "log_transform", [](const std::vector<double>& v) { return log_transform(Sample{"", v, false}).values; },
        py::arg("values"));

    m.def(
        "mann_whitney",
        [](const std::vector<double>& a, const std::vector<double>& b, const std::string& alternative) {
            return result_dict(mann_whitney_one_sided({"a", a, false}, {"b", b, false}, parse_alternative(alternative)));
        },
        py::arg("a"), py::arg("b"), py::arg("alternative") = "less");

    m.def(
        "brunner_munzel",
        [](const std::vector<double>& a, const std::vector<double>& b, const std::string& alternative) {
            return result_dict(
                brunner_munzel_one_sided({"a", a, false}, {"b", b, false}, parse_alternative(alternative)));
        },
        py::arg("a"), py::arg("b"), py::arg("alternative") = "less");
}
