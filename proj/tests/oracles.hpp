#pragma once

// Reference implementations used only by the tests. They share no code path
// with the library routines they check.

#include "coverage_ph/filtration.hpp"
#include "coverage_ph/ingest.hpp"
#include "coverage_ph/traveltime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

using coverage_ph::DissimilarityMatrix;
using coverage_ph::Facility;

// Full pairwise sort, then the first k entries per row.
inline std::vector<std::vector<std::size_t>> brute_knn(const std::vector<Facility>& f, std::size_t k) {
    std::vector<std::vector<std::size_t>> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::vector<std::tuple<double, std::string, std::size_t>> all;
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (j != i) all.emplace_back(coverage_ph::haversine_km(f[i].position(), f[j].position()), f[j].id, j);
        }
        std::sort(all.begin(), all.end());
        for (std::size_t r = 0; r < std::min(k, all.size()); ++r) out[i].push_back(std::get<2>(all[r]));
    }
    return out;
}

// Kruskal minimum spanning forest weights, ascending.
inline std::vector<double> kruskal_forest(std::size_t n, const DissimilarityMatrix& m) {
    std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
    for (const auto& [p, w] : m.entries) edges.emplace_back(w, p.first, p.second);
    std::sort(edges.begin(), edges.end());
    std::vector<std::size_t> comp(n);
    std::iota(comp.begin(), comp.end(), std::size_t{0});
    std::vector<double> weights;
    for (auto [w, a, b] : edges) {
        auto ca = comp[a];
        auto cb = comp[b];
        if (ca == cb) continue;
        for (auto& c : comp) {
            if (c == cb) c = ca;
        }
        weights.push_back(w);
    }
    return weights;
}

inline std::size_t component_count(std::size_t n, const DissimilarityMatrix& m) {
    return n - kruskal_forest(n, m).size();
}

// Boundary matrix straight from the simplex list, looked up through a std::map.
inline std::vector<std::vector<std::size_t>> columns_of(const std::vector<coverage_ph::Simplex>& s) {
    std::map<std::vector<coverage_ph::VertexId>, std::size_t> where;
    for (std::size_t i = 0; i < s.size(); ++i) {
        where[std::vector<coverage_ph::VertexId>(s[i].verts().begin(), s[i].verts().end())] = i;
    }
    std::vector<std::vector<std::size_t>> cols(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::vector<coverage_ph::VertexId> v(s[i].verts().begin(), s[i].verts().end());
        if (v.size() == 1) continue;
        for (std::size_t skip = 0; skip < v.size(); ++skip) {
            std::vector<coverage_ph::VertexId> face;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (j != skip) face.push_back(v[j]);
            }
            cols[i].push_back(where.at(face));
        }
        std::sort(cols[i].begin(), cols[i].end());
    }
    return cols;
}

// Standard left-to-right reduction over Z/2 with dense bit columns.
// Returns the low row of each reduced column, or -1.
inline std::vector<long> naive_reduce(const std::vector<std::vector<std::size_t>>& cols) {
    const std::size_t m = cols.size();
    std::vector<std::vector<char>> dense(m, std::vector<char>(m, 0));
    for (std::size_t j = 0; j < m; ++j) {
        for (auto r : cols[j]) dense[j][r] = 1;
    }
    auto low = [&](std::size_t j) -> long {
        for (long r = static_cast<long>(m) - 1; r >= 0; --r) {
            if (dense[j][r]) return r;
        }
        return -1;
    };
    std::vector<long> lows(m, -1);
    for (std::size_t j = 0; j < m; ++j) {
        for (;;) {
            long l = low(j);
            if (l < 0) break;
            long other = -1;
            for (std::size_t k = 0; k < j; ++k) {
                if (lows[k] == l) {
                    other = static_cast<long>(k);
                    break;
                }
            }
            if (other < 0) break;
            for (std::size_t r = 0; r < m; ++r) dense[j][r] ^= dense[other][r];
        }
        lows[j] = low(j);
    }
    return lows;
}

// (birth, death) multiset of H1 from the naive reduction, positive persistence
// only; essential classes have death = +inf.
inline std::vector<std::pair<double, double>> naive_h1(const std::vector<coverage_ph::Simplex>& s) {
    auto lows = naive_reduce(columns_of(s));
    std::vector<bool> paired(s.size(), false);
    std::vector<std::pair<double, double>> out;
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (lows[j] < 0) continue;
        paired[static_cast<std::size_t>(lows[j])] = true;
        const auto& creator = s[static_cast<std::size_t>(lows[j])];
        if (s[j].dim == 2 && s[j].value > creator.value) out.emplace_back(creator.value, s[j].value);
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].dim == 1 && lows[i] < 0 && !paired[i]) {
            out.emplace_back(s[i].value, std::numeric_limits<double>::infinity());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline DissimilarityMatrix matrix_from(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& e) {
    DissimilarityMatrix m;
    for (std::size_t i = 0; i < n; ++i) m.ids.push_back("v" + std::to_string(i));
    for (auto [a, b, w] : e) m.set(a, b, w);
    return m;
}

// Random weights; `density` < 1 drops pairs to make sparse instances.
inline DissimilarityMatrix random_matrix(std::mt19937_64& rng, std::size_t n, double density) {
    std::uniform_real_distribution<double> weight(1.0, 500.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::tuple<std::size_t, std::size_t, double>> e;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (density >= 1.0 || coin(rng) < density) e.emplace_back(i, j, weight(rng));
        }
    }
    return matrix_from(n, e);
}

// Euclidean points in the plane: a metric instance with a geometric flavor.
inline DissimilarityMatrix random_euclidean(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> coord(0.0, 100.0);
    std::vector<std::pair<double, double>> p(n);
    for (auto& q : p) q = {coord(rng), coord(rng)};
    std::vector<std::tuple<std::size_t, std::size_t, double>> e;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            e.emplace_back(i, j, std::hypot(p[i].first - p[j].first, p[i].second - p[j].second));
        }
    }
    return matrix_from(n, e);
}

// Exact one-sided Mann-Whitney p by enumerating every way to place sample a's
// ranks among the pooled positions (tie-free data).
inline double mann_whitney_enumerated(const std::vector<double>& a, const std::vector<double>& b, bool less) {
    const std::size_t na = a.size();
    const std::size_t n = na + b.size();
    double observed = 0.0;
    for (double x : a) {
        for (double y : b) observed += x > y ? 1.0 : 0.0;
    }
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(na), true);
    std::sort(pick.begin(), pick.end());
    long hits = 0;
    long total = 0;
    do {
        // U = sum over a positions of (# b positions below it)
        double u = 0.0;
        std::size_t b_below = 0;
        for (std::size_t pos = 0; pos < n; ++pos) {
            if (pick[pos]) {
                u += static_cast<double>(b_below);
            } else {
                ++b_below;
            }
        }
        ++total;
        if (less ? u <= observed : u >= observed) ++hits;
    } while (std::next_permutation(pick.begin(), pick.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
}

// Brunner-Munzel statistic from pairwise placements.
inline double brunner_munzel_placements(const std::vector<double>& a, const std::vector<double>& b) {
    auto place = [](double x, const std::vector<double>& other) {
        double c = 0.0;
        for (double y : other) c += (y < x) ? 1.0 : (y == x ? 0.5 : 0.0);
        return c;
    };
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::vector<double> pa, pb;
    for (double x : a) pa.push_back(place(x, b));
    for (double y : b) pb.push_back(place(y, a));
    const double ma = std::accumulate(pa.begin(), pa.end(), 0.0) / na;
    const double mb = std::accumulate(pb.begin(), pb.end(), 0.0) / nb;
    double sa = 0.0, sb = 0.0;
    for (double v : pa) sa += (v - ma) * (v - ma);
    for (double v : pb) sb += (v - mb) * (v - mb);
    sa /= (na - 1.0);
    sb /= (nb - 1.0);
    // relative effect P(A < B) + P(A = B)/2
    const double effect = mb / na;
    // W = (effect - 1/2) / sqrt(S_a / (n_a n_b^2) + S_b / (n_b n_a^2))
    return (effect - 0.5) / std::sqrt(sa / (na * nb * nb) + sb / (nb * na * na));
}

} // namespace oracle
