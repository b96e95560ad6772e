#pragma once

// Synthetic datasets and scratch directories shared by the test binaries.

#include "coverage_ph/ingest.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixtures {

namespace fs = std::filesystem;
using coverage_ph::CountyStats;
using coverage_ph::CountyTable;
using coverage_ph::Facility;
using coverage_ph::FacilityKind;

class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "coverage_ph_XXXXXX").string();
        if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

struct Dataset {
    std::vector<Facility> facilities;
    CountyTable counties;
};

inline constexpr double kKmPerDegreeLat = 6371.0 * 3.14159265358979323846 / 180.0;

inline Facility make_facility(std::string id, FacilityKind kind, double lat, double lon,
                              std::string county = "Central") {
    return Facility{id, "Clinic " + id, kind, lat, lon, std::move(county)};
}

// A chain of clinics with alternating kinds plus a remote FQHC cluster that
// is reached only through PPHC stepping stones. Dropping the PPHCs doubles the
// spacing along the chain and opens a wide gap in front of the cluster.
inline Dataset coverage_gap_fixture(std::size_t chain = 80) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> gap_km(10.0, 20.0);
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    Dataset d;
    d.counties.insert(CountyStats{"Central", 1'000'000, 500'000});
    double lat = 35.0;
    auto step = [&](double km) { lat += km / kKmPerDegreeLat; };
    char buf[16];
    for (std::size_t i = 0; i < chain; ++i) {
        std::snprintf(buf, sizeof buf, "c%03zu", i);
        auto kind = i % 2 == 0 ? FacilityKind::FQHC : FacilityKind::PPHC;
        d.facilities.push_back(make_facility(buf, kind, lat, -119.5 + jitter(rng)));
        step(gap_km(rng));
    }
    for (int i = 0; i < 3; ++i) {
        std::snprintf(buf, sizeof buf, "s%d", i);
        d.facilities.push_back(make_facility(buf, FacilityKind::PPHC, lat, -119.5));
        step(14.0 + i);
    }
    std::uniform_real_distribution<double> cluster_gap(10.0, 15.0);
    for (int i = 0; i < 6; ++i) {
        std::snprintf(buf, sizeof buf, "r%d", i);
        d.facilities.push_back(make_facility(buf, FacilityKind::FQHC, lat, -119.5 + jitter(rng)));
        step(cluster_gap(rng));
    }
    return d;
}

// Uniform random facilities over a California-sized box, several counties
// with a spread of vehicle ratios (some above 1).
inline Dataset random_dataset(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lat(33.0, 41.0);
    std::uniform_real_distribution<double> lon(-123.0, -115.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Dataset d;
    const char* names[] = {"Alpine", "Butte", "Colusa", "Del Norte", "El Dorado", "Fresno"};
    const std::int64_t pops[] = {1'200, 210'000, 21'000, 27'000, 190'000, 1'000'000};
    const std::int64_t cars[] = {1'500, 150'000, 9'000, 20'000, 200'000, 700'000};
    for (int c = 0; c < 6; ++c) d.counties.insert(CountyStats{names[c], pops[c], cars[c]});
    char buf[16];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "f%03zu", i);
        auto kind = unit(rng) < 0.3 ? FacilityKind::PPHC : FacilityKind::FQHC;
        d.facilities.push_back(make_facility(buf, kind, lat(rng), lon(rng), names[i % 6]));
    }
    return d;
}

// Writes facilities.csv, counties.csv and run.toml into dir; returns the config path.
inline fs::path write_run(const fs::path& dir, const Dataset& d, std::size_t k,
                          const std::string& extra = {}) {
    {
        std::ofstream out(dir / "facilities.csv");
        coverage_ph::write_facilities(out, d.facilities);
    }
    {
        std::ofstream out(dir / "counties.csv");
        coverage_ph::write_counties(out, d.counties);
    }
    auto config = dir / "run.toml";
    std::ofstream out(config);
    out << "# synthetic run\n"
        << "facilities = \"facilities.csv\"\n"
        << "counties = \"counties.csv\"\n"
        << "cache = \"travel_cache.jsonl\"\n"
        << "output_dir = \"out\"\n"
        << "provider = \"synthetic\"\n"
        << "k = " << k << "\n"
        << extra;
    return config;
}

} // namespace fixtures
