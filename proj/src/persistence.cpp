#include "coverage_ph/persistence.hpp"

#include "coverage_ph/error.hpp"

#include <algorithm>
#include <numeric>

namespace coverage_ph {

namespace {

std::vector<VertexId> to_vector(const Simplex& s) { return {s.verts().begin(), s.verts().end()}; }

// Symmetric difference of two ascending index lists.
void add_column(std::vector<std::size_t>& target, const std::vector<std::size_t>& source,
                std::vector<std::size_t>& scratch) {
    scratch.clear();
    std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                  std::back_inserter(scratch));
    target.swap(scratch);
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    // The root is always the smallest vertex (the oldest) of its component.
    void attach(std::size_t child_root, std::size_t parent_root) { parent_[child_root] = parent_root; }

private:
    std::vector<std::size_t> parent_;
};

} // namespace

DiagramSummary summarize(std::span<const PersistencePair> pairs) {
    DiagramSummary s;
    double sum[2] = {0.0, 0.0};
    for (const auto& p : pairs) {
        if (p.dim < 0 || p.dim > 1) continue;
        ++s.count[p.dim];
        if (p.essential()) {
            ++s.essential[p.dim];
            continue;
        }
        ++s.finite[p.dim];
        sum[p.dim] += p.death;
        if (p.dim == 0) {
            s.connectivity_horizon = s.connectivity_horizon ? std::max(*s.connectivity_horizon, p.death)
                                                            : p.death;
        }
    }
    for (int d = 0; d < 2; ++d) {
        if (s.finite[d] > 0) s.mean_death[d] = sum[d] / static_cast<double>(s.finite[d]);
    }
    if (s.finite[0] + s.finite[1] > 0) {
        s.pooled_mean_death = (sum[0] + sum[1]) / static_cast<double>(s.finite[0] + s.finite[1]);
    }
    return s;
}

std::vector<PersistencePair> compute_h0(const Filtration& filtration) {
    const std::size_t n = filtration.vertex_count();
    DisjointSets sets(n);
    std::vector<PersistencePair> pairs;
    pairs.reserve(n);
    for (const auto& s : filtration.simplices()) {
        if (s.dim != 1) continue;
        auto ra = sets.find(s.vertices[0]);
        auto rb = sets.find(s.vertices[1]);
        if (ra == rb) continue;
        auto elder = std::min(ra, rb);
        auto younger = std::max(ra, rb);
        sets.attach(younger, elder);
        PersistencePair p;
        p.dim = 0;
        p.birth = 0.0;
        p.death = s.value;
        p.birth_simplex = {static_cast<VertexId>(younger)};
        p.death_simplex = to_vector(s);
        pairs.push_back(std::move(p));
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (sets.find(v) != v) continue;
        PersistencePair p;
        p.dim = 0;
        p.birth_simplex = {static_cast<VertexId>(v)};
        pairs.push_back(std::move(p));
    }
    return pairs;
}

BoundaryColumns boundary_columns(const Filtration& filtration) {
    BoundaryColumns columns(filtration.size());
    for (std::size_t i = 0; i < filtration.size(); ++i) columns[i] = filtration.boundary(i);
    return columns;
}

std::vector<std::pair<std::size_t, std::size_t>> BoundaryReduction::pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t j = 0; j < low.size(); ++j) {
        if (low[j] != kNone) out.emplace_back(low[j], j);
    }
    return out;
}

BoundaryReduction reduce_boundary_matrix(const BoundaryColumns& columns) {
    const std::size_t m = columns.size();
    BoundaryReduction result;
    result.low.assign(m, BoundaryReduction::kNone);
    result.pivot_column.assign(m, BoundaryReduction::kNone);

    int max_dim = 0;
    for (const auto& col : columns) {
        if (!col.empty()) max_dim = std::max(max_dim, static_cast<int>(col.size()) - 1);
    }

    std::vector<bool> cleared(m, false);
    std::vector<std::vector<std::size_t>> reduced(m);
    std::vector<std::size_t> scratch;
    for (int dim = max_dim; dim >= 1; --dim) {
        for (std::size_t j = 0; j < m; ++j) {
            if (static_cast<int>(columns[j].size()) - 1 != dim || cleared[j]) continue;
            auto col = columns[j];
            for (auto face : col) {
                if (face >= j) throw InternalError("boundary column references a later simplex");
            }
            while (!col.empty()) {
                auto owner = result.pivot_column[col.back()];
                if (owner == BoundaryReduction::kNone) break;
                add_column(col, reduced[owner], scratch);
            }
            if (col.empty()) continue;
            auto pivot = col.back();
            result.low[j] = pivot;
            result.pivot_column[pivot] = j;
            cleared[pivot] = true;
            reduced[j] = std::move(col);
        }
    }
    return result;
}

std::vector<PersistencePair> compute_h1(const Filtration& filtration) {
    auto reduction = reduce_boundary_matrix(boundary_columns(filtration));
    std::vector<PersistencePair> pairs;
    for (std::size_t j = 0; j < filtration.size(); ++j) {
        const auto& s = filtration[j];
        if (s.dim == 2 && reduction.low[j] != BoundaryReduction::kNone) {
            const auto& creator = filtration[reduction.low[j]];
            if (s.value > creator.value) {
                pairs.push_back({1, creator.value, s.value, to_vector(creator), to_vector(s)});
            }
        }
    }
    for (std::size_t i = 0; i < filtration.size(); ++i) {
        const auto& s = filtration[i];
        if (s.dim == 1 && reduction.low[i] == BoundaryReduction::kNone &&
            reduction.pivot_column[i] == BoundaryReduction::kNone) {
            pairs.push_back({1, s.value, kInfinity, to_vector(s), {}});
        }
    }
    return pairs;
}

Diagram compute_diagram(const Filtration& filtration, std::string label) {
    Diagram d;
    d.label = std::move(label);
    d.pairs = compute_h0(filtration);
    auto h1 = compute_h1(filtration);
    d.pairs.insert(d.pairs.end(), std::make_move_iterator(h1.begin()),
                   std::make_move_iterator(h1.end()));
    d.summary = summarize(d.pairs);
    return d;
}

std::vector<DeathFeature> extract_death_simplices(std::span<const PersistencePair> pairs,
                                                  std::span<const Facility> facilities,
                                                  double min_death) {
    std::vector<DeathFeature> out;
    for (const auto& p : pairs) {
        if (p.essential() || p.death < min_death) continue;
        DeathFeature f;
        f.dim = p.dim;
        f.birth = p.birth;
        f.death = p.death;
        f.vertices = p.death_simplex;
        for (auto v : p.death_simplex) {
            if (v >= facilities.size()) throw InternalError("death simplex vertex out of range");
            f.ids.push_back(facilities[v].id);
            f.coordinates.push_back(facilities[v].position());
        }
        out.push_back(std::move(f));
    }
    std::stable_sort(out.begin(), out.end(), [](const DeathFeature& a, const DeathFeature& b) {
        if (a.death != b.death) return a.death > b.death;
        if (a.dim != b.dim) return a.dim < b.dim;
        return a.vertices < b.vertices;
    });
    return out;
}

DeathSelection parse_death_selection(std::string_view token) {
    if (token == "h0") return DeathSelection::H0;
    if (token == "h1") return DeathSelection::H1;
    if (token == "pooled") return DeathSelection::Pooled;
    throw ValidationError("unknown death selection '" + std::string(token) + "'");
}

std::string_view to_string(DeathSelection selection) {
    switch (selection) {
    case DeathSelection::H0: return "h0";
    case DeathSelection::H1: return "h1";
    case DeathSelection::Pooled: break;
    }
    return "pooled";
}

std::vector<double> finite_deaths(std::span<const PersistencePair> pairs, DeathSelection which) {
    std::vector<double> out;
    for (const auto& p : pairs) {
        if (p.essential()) continue;
        bool wanted = which == DeathSelection::Pooled || (which == DeathSelection::H0 && p.dim == 0) ||
                      (which == DeathSelection::H1 && p.dim == 1);
        if (wanted) out.push_back(p.death);
    }
    return out;
}

} // namespace coverage_ph
