#include "coverage_ph/filtration.hpp"

#include "coverage_ph/error.hpp"
#include "csv.hpp"

#include <algorithm>

namespace coverage_ph {

namespace {

constexpr VertexId kMaxVertex = (VertexId{1} << 21) - 2;

std::uint64_t pack(std::span<const VertexId> v) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < v.size(); ++i) key |= std::uint64_t{v[i] + 1} << (21 * i);
    return key;
}

} // namespace

Simplex Simplex::vertex(VertexId v) {
    Simplex s;
    s.vertices = {v, 0, 0};
    s.dim = 0;
    s.value = 0.0;
    return s;
}

Simplex Simplex::edge(VertexId a, VertexId b, double value) {
    if (a == b) throw InternalError("degenerate edge");
    Simplex s;
    s.vertices = {std::min(a, b), std::max(a, b), 0};
    s.dim = 1;
    s.value = value;
    return s;
}

Simplex Simplex::triangle(VertexId a, VertexId b, VertexId c, double value) {
    std::array<VertexId, 3> v{a, b, c};
    std::sort(v.begin(), v.end());
    if (v[0] == v[1] || v[1] == v[2]) throw InternalError("degenerate triangle");
    Simplex s;
    s.vertices = v;
    s.dim = 2;
    s.value = value;
    return s;
}

bool filtration_less(const Simplex& a, const Simplex& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.dim != b.dim) return a.dim < b.dim;
    return std::lexicographical_compare(a.verts().begin(), a.verts().end(), b.verts().begin(),
                                        b.verts().end());
}

std::vector<Simplex> build_edges(const DissimilarityMatrix& matrix) {
    if (matrix.n() > kMaxVertex) throw ValidationError("too many facilities for the filtration");
    std::vector<Simplex> edges;
    edges.reserve(matrix.entries.size());
    for (const auto& [pair, minutes] : matrix.entries) {
        edges.push_back(Simplex::edge(static_cast<VertexId>(pair.first),
                                      static_cast<VertexId>(pair.second), minutes));
    }
    return edges;
}

std::vector<Simplex> build_triangles(std::span<const Simplex> edges, std::size_t n_vertices) {
    // Upper adjacency: for a < b, b is listed under a with the edge value.
    std::vector<std::vector<std::pair<VertexId, double>>> upper(n_vertices);
    for (const auto& e : edges) {
        if (e.dim != 1) throw InternalError("build_triangles expects edges");
        upper[e.vertices[0]].emplace_back(e.vertices[1], e.value);
    }
    for (auto& list : upper) {
        std::sort(list.begin(), list.end());
        auto dup = std::adjacent_find(list.begin(), list.end(),
                                      [](const auto& x, const auto& y) { return x.first == y.first; });
        if (dup != list.end()) throw InternalError("duplicate edge");
    }

    std::vector<Simplex> triangles;
    for (VertexId a = 0; a < n_vertices; ++a) {
        const auto& na = upper[a];
        for (std::size_t ib = 0; ib < na.size(); ++ib) {
            auto [b, ab] = na[ib];
            const auto& nb = upper[b];
            // c > b adjacent to both a and b: merge the sorted tails.
            auto ia = ib + 1;
            std::size_t jb = 0;
            while (ia < na.size() && jb < nb.size()) {
                if (na[ia].first < nb[jb].first) {
                    ++ia;
                } else if (nb[jb].first < na[ia].first) {
                    ++jb;
                } else {
                    double value = std::max({ab, na[ia].second, nb[jb].second});
                    triangles.push_back(Simplex::triangle(a, b, na[ia].first, value));
                    ++ia;
                    ++jb;
                }
            }
        }
    }
    return triangles;
}

Filtration::Filtration(std::vector<Simplex> ordered) : simplices_(std::move(ordered)) {
    index_.reserve(simplices_.size());
    for (std::size_t i = 0; i < simplices_.size(); ++i) {
        const auto& s = simplices_[i];
        for (auto v : s.verts()) {
            if (v > kMaxVertex) throw ValidationError("vertex index too large");
        }
        if (s.dim == 0) ++vertex_count_;
        if (!index_.emplace(pack(s.verts()), i).second) {
            throw InternalError("duplicate simplex in filtration");
        }
    }
}

std::optional<std::size_t> Filtration::position(std::span<const VertexId> vertices) const {
    auto it = index_.find(pack(vertices));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::size_t> Filtration::boundary(std::size_t pos) const {
    const auto& s = simplices_[pos];
    std::vector<std::size_t> faces;
    if (s.dim == 0) return faces;
    auto v = s.verts();
    for (std::size_t skip = 0; skip < v.size(); ++skip) {
        std::array<VertexId, 2> face{};
        std::size_t k = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i != skip) face[k++] = v[i];
        }
        auto p = position(std::span<const VertexId>(face.data(), k));
        if (!p) throw InternalError("missing face in filtration");
        faces.push_back(*p);
    }
    std::sort(faces.begin(), faces.end());
    return faces;
}

bool has_face_closure(const Filtration& filtration) {
    for (std::size_t i = 0; i < filtration.size(); ++i) {
        const auto& s = filtration[i];
        if (s.dim == 0) continue;
        auto v = s.verts();
        for (std::size_t skip = 0; skip < v.size(); ++skip) {
            std::array<VertexId, 2> face{};
            std::size_t k = 0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (j != skip) face[k++] = v[j];
            }
            auto p = filtration.position(std::span<const VertexId>(face.data(), k));
            if (!p || *p >= i) return false;
        }
    }
    return true;
}

Filtration assemble_filtration(std::size_t n_vertices, std::vector<Simplex> edges,
                               std::vector<Simplex> triangles) {
    std::vector<Simplex> all;
    all.reserve(n_vertices + edges.size() + triangles.size());
    for (std::size_t v = 0; v < n_vertices; ++v) all.push_back(Simplex::vertex(static_cast<VertexId>(v)));
    for (auto& e : edges) {
        if (e.dim != 1 || e.value < 0.0) throw InternalError("invalid edge simplex");
        all.push_back(e);
    }
    for (auto& t : triangles) {
        if (t.dim != 2 || t.value < 0.0) throw InternalError("invalid triangle simplex");
        all.push_back(t);
    }
    std::sort(all.begin(), all.end(), filtration_less);
    Filtration f(std::move(all));
    if (!has_face_closure(f)) throw InternalError("filtration violates face closure");
    return f;
}

Filtration build_filtration(const DissimilarityMatrix& matrix) {
    auto edges = build_edges(matrix);
    auto triangles = build_triangles(edges, matrix.n());
    return assemble_filtration(matrix.n(), std::move(edges), std::move(triangles));
}

void write_filtration_csv(std::ostream& out, const Filtration& filtration) {
    out << "position,dim,vertices,value\n";
    for (std::size_t i = 0; i < filtration.size(); ++i) {
        const auto& s = filtration[i];
        out << i << ',' << s.dim << ',';
        for (std::size_t k = 0; k < s.verts().size(); ++k) {
            if (k) out << ';';
            out << s.verts()[k];
        }
        out << ',' << detail::format_double(s.value) << '\n';
    }
}

} // namespace coverage_ph
