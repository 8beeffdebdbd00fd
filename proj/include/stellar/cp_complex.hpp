#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stellar/error.hpp"
#include "stellar/sre.hpp"

namespace stellar {

enum class CellFamily : std::uint8_t { simplex = 0, cube = 1 };

/// Cell shape descriptor. A Simplex(k) cell carries k+1 vertex references,
/// a Cube(k) cell carries 2^k.
struct CellKind {
    CellFamily family = CellFamily::simplex;
    int dim = 0;

    index_t arity() const {
        if (family == CellFamily::simplex) return static_cast<index_t>(dim + 1);
        require(dim <= 20, errc::unsupported_cell, "cube dimension too large");
        return static_cast<index_t>(index_t{1} << dim);
    }

    bool operator==(const CellKind&) const = default;
    // buckets order by dimension first, then family
    auto operator<=>(const CellKind& o) const {
        if (auto c = dim <=> o.dim; c != 0) return c;
        return family <=> o.family;
    }

    std::string name() const {
        return (family == CellFamily::simplex ? "simplex" : "cube") + std::to_string(dim);
    }
};

inline CellKind simplex(int k) { return CellKind{CellFamily::simplex, k}; }
inline CellKind cube(int k) { return CellKind{CellFamily::cube, k}; }

/// Handle of a top cell inside an IndexedComplex: bucket ordinal plus the
/// cell's position in that bucket's array.
struct TopCellRef {
    std::uint32_t bucket = 0;
    index_t index = 0;

    bool operator==(const TopCellRef&) const = default;
    auto operator<=>(const TopCellRef&) const = default;
};

/// Sorts a vertex tuple ascending. Two tuples are equal exactly when they
/// reference the same vertex set, which identifies a CP cell.
inline std::vector<index_t> canonical_tuple(std::span<const index_t> verts) {
    require(!verts.empty(), errc::precondition, "canonical_tuple: empty tuple");
    std::vector<index_t> out(verts.begin(), verts.end());
    std::sort(out.begin(), out.end());
    for (std::size_t i = 1; i < out.size(); ++i)
        require(out[i] != out[i - 1], errc::malformed_cell, "canonical_tuple: duplicate vertex");
    return out;
}

namespace detail {

inline count_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    count_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<count_t>(n - k + i) / static_cast<count_t>(i);
    return r;
}

// Fixed facet tables for cube cells, in position space. Quad vertices are in
// cyclic boundary order, hexahedra in bottom-face-CCW-then-top-face-CCW order.
inline const std::vector<std::vector<int>>& cube_facet_table(int dim) {
    static const std::vector<std::vector<int>> cube1 = {{0}, {1}};
    static const std::vector<std::vector<int>> cube2 = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    static const std::vector<std::vector<int>> cube3 = {
        {0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4}, {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
    switch (dim) {
        case 1: return cube1;
        case 2: return cube2;
        case 3: return cube3;
        default: fail(errc::unsupported_cell, "no facet table for cube dimension " + std::to_string(dim));
    }
}

} // namespace detail

/// Number of p-faces of a cell: C(k+1, p+1) for a k-simplex,
/// 2^(k-p) * C(k, p) for a k-cube.
inline count_t boundary_face_count(CellKind kind, int p) {
    require(p >= 0 && p < kind.dim, errc::dimension, "boundary_face_count: need 0 <= p < k");
    if (kind.family == CellFamily::simplex) return detail::binomial(kind.dim + 1, p + 1);
    return (count_t{1} << (kind.dim - p)) * detail::binomial(kind.dim, p);
}

/// Enumerates the p-faces of a cell as vertex tuples. The position of a face
/// in the result is its face-local index, which fixes the adjacency slot
/// convention for the generators.
///
/// Simplices: faces are ordered by the lexicographic order of their omitted
/// position sets, so for p = k-1 face i is the facet opposite vertex
/// position i. Each face tuple keeps the parent cell's vertex order.
/// Cubes: facets follow the fixed tables above; lower-dimensional faces are
/// gathered recursively in first-encounter order.
inline std::vector<std::vector<index_t>> boundary_faces(CellKind kind,
                                                        std::span<const index_t> verts, int p) {
    require(p >= 0 && p < kind.dim, errc::dimension, "boundary_faces: need 0 <= p < k");
    require(static_cast<index_t>(verts.size()) == kind.arity(), errc::malformed_cell,
            "boundary_faces: tuple arity does not match cell kind");
    std::vector<std::vector<index_t>> faces;

    if (kind.family == CellFamily::simplex) {
        const int k = kind.dim;
        const int omit = k - p;
        faces.reserve(static_cast<std::size_t>(detail::binomial(k + 1, p + 1)));
        // iterate omitted position sets in lexicographic order
        std::vector<int> comb(omit);
        for (int i = 0; i < omit; ++i) comb[i] = i;
        while (true) {
            std::vector<index_t> face;
            face.reserve(p + 1);
            int c = 0;
            for (int pos = 0; pos <= k; ++pos) {
                if (c < omit && comb[c] == pos) {
                    ++c;
                } else {
                    face.push_back(verts[pos]);
                }
            }
            faces.push_back(std::move(face));
            int t = omit - 1;
            while (t >= 0 && comb[t] == k - (omit - 1 - t)) --t;
            if (t < 0) break;
            ++comb[t];
            for (int s = t + 1; s < omit; ++s) comb[s] = comb[s - 1] + 1;
        }
        return faces;
    }

    // cube: start from the facet table, recurse for deeper faces
    const auto& table = detail::cube_facet_table(kind.dim);
    if (p == kind.dim - 1) {
        faces.reserve(table.size());
        for (const auto& facet : table) {
            std::vector<index_t> face;
            face.reserve(facet.size());
            for (int pos : facet) face.push_back(verts[static_cast<std::size_t>(pos)]);
            faces.push_back(std::move(face));
        }
        return faces;
    }
    std::map<std::vector<index_t>, bool> seen;
    for (const auto& facet : table) {
        std::vector<index_t> facet_verts;
        facet_verts.reserve(facet.size());
        for (int pos : facet) facet_verts.push_back(verts[static_cast<std::size_t>(pos)]);
        auto sub = boundary_faces(cube(kind.dim - 1), facet_verts, p);
        for (auto& f : sub) {
            auto key = canonical_tuple(f);
            if (!seen.emplace(std::move(key), true).second) continue;
            faces.push_back(std::move(f));
        }
    }
    return faces;
}

/// One homogeneous array of top cells: every cell has the same kind and its
/// R(k,0) vertex tuple is stored arity-strided.
class TopCellBucket {
public:
    explicit TopCellBucket(CellKind kind) : kind_(kind), arity_(kind.arity()) {}

    CellKind kind() const { return kind_; }
    index_t arity() const { return arity_; }
    index_t size() const { return static_cast<index_t>(verts_.size() / static_cast<std::size_t>(arity_)); }

    std::span<const index_t> verts(index_t cell) const {
        return {verts_.data() + static_cast<std::size_t>(cell) * arity_, static_cast<std::size_t>(arity_)};
    }

    void push_back(std::span<const index_t> tuple) {
        verts_.insert(verts_.end(), tuple.begin(), tuple.end());
    }

    std::vector<index_t>& raw_verts() { return verts_; }
    const std::vector<index_t>& raw_verts() const { return verts_; }

private:
    CellKind kind_;
    index_t arity_;
    std::vector<index_t> verts_;
};

/// Indexed representation of a CP complex: vertex coordinates plus one array
/// of top cells per (dimension, family) present in the complex. Buckets are
/// kept sorted by (dimension, family), and a top cell is identified by its
/// bucket and position.
class IndexedComplex {
public:
    IndexedComplex() = default;

    explicit IndexedComplex(int ambient_dim) : ambient_dim_(ambient_dim) {
        require(ambient_dim >= 1, errc::parameter, "ambient dimension must be >= 1");
    }

    int ambient_dim() const { return ambient_dim_; }

    index_t vertex_count() const {
        return ambient_dim_ == 0 ? 0
                                 : static_cast<index_t>(coords_.size() / static_cast<std::size_t>(ambient_dim_));
    }

    std::span<const double> vertex(index_t v) const {
        return {coords_.data() + static_cast<std::size_t>(v) * ambient_dim_,
                static_cast<std::size_t>(ambient_dim_)};
    }

    index_t add_vertex(std::span<const double> coords) {
        require(static_cast<int>(coords.size()) == ambient_dim_, errc::parameter,
                "vertex coordinate count does not match ambient dimension");
        coords_.insert(coords_.end(), coords.begin(), coords.end());
        return vertex_count() - 1;
    }

    /// Appends a top cell, validating arity, index range and duplicates.
    /// Input vertex order is preserved.
    TopCellRef add_cell(CellKind kind, std::span<const index_t> verts) {
        require(kind.dim >= 1, errc::dimension, "top cells must have dimension >= 1");
        require(static_cast<index_t>(verts.size()) == kind.arity(), errc::malformed_cell,
                kind.name() + " cell must carry " + std::to_string(kind.arity()) + " vertices");
        for (index_t v : verts)
            require(v >= 0 && v < vertex_count(), errc::index_range,
                    "cell references vertex " + std::to_string(v) + " out of range");
        std::vector<index_t> sorted(verts.begin(), verts.end());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 1; i < sorted.size(); ++i)
            require(sorted[i] != sorted[i - 1], errc::malformed_cell, "cell repeats a vertex");
        auto b = bucket_ordinal(kind, true);
        buckets_[b].push_back(verts);
        return {static_cast<std::uint32_t>(b), buckets_[b].size() - 1};
    }

    const std::vector<TopCellBucket>& buckets() const { return buckets_; }
    std::vector<TopCellBucket>& buckets() { return buckets_; }

    const TopCellBucket& bucket(std::uint32_t b) const { return buckets_[b]; }

    std::span<const index_t> cell_verts(TopCellRef ref) const {
        return buckets_[ref.bucket].verts(ref.index);
    }

    /// Highest dimension with top cells; 0 for a point cloud.
    int complex_dim() const {
        int d = 0;
        for (const auto& b : buckets_)
            if (b.size() > 0) d = std::max(d, b.kind().dim);
        return d;
    }

    count_t top_cell_count() const {
        count_t n = 0;
        for (const auto& b : buckets_) n += static_cast<count_t>(b.size());
        return n;
    }

    /// Reference count of the indexed representation:
    /// n*|V| + sum over top cells of their vertex-tuple arity.
    count_t storage_cost() const {
        count_t cost = static_cast<count_t>(ambient_dim_) * static_cast<count_t>(vertex_count());
        for (const auto& b : buckets_)
            cost += static_cast<count_t>(b.size()) * static_cast<count_t>(b.arity());
        return cost;
    }

    const std::vector<double>& raw_coords() const { return coords_; }
    std::vector<double>& raw_coords() { return coords_; }

private:
    std::size_t bucket_ordinal(CellKind kind, bool create) {
        auto it = std::lower_bound(buckets_.begin(), buckets_.end(), kind,
                                   [](const TopCellBucket& b, CellKind k) { return b.kind() < k; });
        if (it != buckets_.end() && it->kind() == kind)
            return static_cast<std::size_t>(it - buckets_.begin());
        require(create, errc::dimension, "no bucket for " + kind.name());
        const auto pos = buckets_.insert(it, TopCellBucket(kind));
        return static_cast<std::size_t>(pos - buckets_.begin());
    }

    int ambient_dim_ = 0;
    std::vector<double> coords_;
    std::vector<TopCellBucket> buckets_;
};

struct SoupCell {
    CellKind kind;
    std::vector<index_t> verts;
};

/// Assembles an IndexedComplex from coordinates plus index-tuple cells.
inline IndexedComplex build_indexed_complex(int ambient_dim, std::span<const double> vertex_coords,
                                            std::span<const SoupCell> soup) {
    IndexedComplex c(ambient_dim);
    require(vertex_coords.size() % static_cast<std::size_t>(ambient_dim) == 0, errc::parameter,
            "coordinate array size is not a multiple of the ambient dimension");
    c.raw_coords().assign(vertex_coords.begin(), vertex_coords.end());
    for (const auto& cell : soup) c.add_cell(cell.kind, cell.verts);
    return c;
}

struct CoordinateSoupCell {
    CellKind kind;
    std::vector<double> corner_coords; // arity * ambient_dim values
};

namespace detail {

// bit-pattern key so welding is exact: -0.0 and 0.0 stay distinct vertices
inline std::vector<std::uint64_t> coord_bits(std::span<const double> coords) {
    std::vector<std::uint64_t> bits(coords.size());
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(bits.data(), coords.data(), coords.size() * sizeof(double));
    return bits;
}

} // namespace detail

/// Soup-of-coordinates ingestion: corners are deduplicated by exact bitwise
/// coordinate equality (no epsilon welding) in first-encounter order.
inline IndexedComplex build_from_coordinate_soup(int ambient_dim,
                                                 std::span<const CoordinateSoupCell> soup) {
    IndexedComplex c(ambient_dim);
    std::map<std::vector<std::uint64_t>, index_t> vertex_of;
    std::vector<index_t> tuple;
    std::vector<SoupCell> cells;
    cells.reserve(soup.size());
    for (const auto& cell : soup) {
        const index_t arity = cell.kind.arity();
        require(cell.corner_coords.size() ==
                    static_cast<std::size_t>(arity) * static_cast<std::size_t>(ambient_dim),
                errc::malformed_cell, "coordinate soup cell has wrong corner count");
        tuple.clear();
        for (index_t i = 0; i < arity; ++i) {
            const std::span<const double> corner(cell.corner_coords.data() + i * ambient_dim,
                                                 static_cast<std::size_t>(ambient_dim));
            auto [it, inserted] =
                vertex_of.try_emplace(detail::coord_bits(corner), c.vertex_count());
            if (inserted) c.add_vertex(corner);
            tuple.push_back(it->second);
        }
        cells.push_back({cell.kind, tuple});
    }
    for (const auto& cell : cells) c.add_cell(cell.kind, cell.verts);
    return c;
}

} // namespace stellar
