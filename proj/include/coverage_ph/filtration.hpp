#pragma once

#include "coverage_ph/traveltime.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

namespace coverage_ph {

using VertexId = std::uint32_t;

// A vertex, edge or triangle with its filtration value in minutes.
struct Simplex {
    std::array<VertexId, 3> vertices{};  // first dim+1 entries used, strictly ascending
    int dim = 0;
    double value = 0.0;

    std::span<const VertexId> verts() const { return {vertices.data(), static_cast<std::size_t>(dim + 1)}; }

    static Simplex vertex(VertexId v);
    static Simplex edge(VertexId a, VertexId b, double value);
    static Simplex triangle(VertexId a, VertexId b, VertexId c, double value);
};

// Canonical order: value, then dimension, then vertices lexicographically.
bool filtration_less(const Simplex& a, const Simplex& b);

std::vector<Simplex> build_edges(const DissimilarityMatrix& matrix);

// Triangles whose three edges all exist; value is the largest edge value.
std::vector<Simplex> build_triangles(std::span<const Simplex> edges, std::size_t n_vertices);

class Filtration {
public:
    Filtration() = default;
    explicit Filtration(std::vector<Simplex> ordered);

    const std::vector<Simplex>& simplices() const { return simplices_; }
    std::size_t size() const { return simplices_.size(); }
    const Simplex& operator[](std::size_t i) const { return simplices_[i]; }
    std::size_t vertex_count() const { return vertex_count_; }

    std::optional<std::size_t> position(std::span<const VertexId> vertices) const;

    // Positions of the codimension-1 faces, ascending.
    std::vector<std::size_t> boundary(std::size_t position) const;

private:
    std::vector<Simplex> simplices_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
    std::size_t vertex_count_ = 0;
};

// Sorts into canonical order and verifies face closure; throws InternalError
// if any face is missing or appears later than its coface.
Filtration assemble_filtration(std::size_t n_vertices, std::vector<Simplex> edges,
                               std::vector<Simplex> triangles);

Filtration build_filtration(const DissimilarityMatrix& matrix);

// True when every face of every simplex sits at an earlier position.
bool has_face_closure(const Filtration& filtration);

// Debug dump: `position,dim,vertices,value`.
void write_filtration_csv(std::ostream& out, const Filtration& filtration);

} // namespace coverage_ph
