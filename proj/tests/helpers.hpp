#pragma once

// Test-only fixtures and independent brute-force oracles. Everything here
// recomputes relations from first principles (full scans over the complex's
// arrays) so the batched implementations can be checked against them.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <stellar/stellar.hpp>

namespace testutil {

using namespace stellar;

// --- fixtures --------------------------------------------------------------

inline IndexedComplex single_tetrahedron() {
    IndexedComplex c(3);
    const double p[4][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (const auto& q : p) c.add_vertex(q);
    const index_t t[4] = {0, 1, 2, 3};
    c.add_cell(simplex(3), t);
    return c;
}

inline IndexedComplex two_tets_shared_triangle() {
    IndexedComplex c(3);
    const double p[5][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
    for (const auto& q : p) c.add_vertex(q);
    const index_t t1[4] = {0, 1, 2, 3};
    const index_t t2[4] = {1, 2, 3, 4};
    c.add_cell(simplex(3), t1);
    c.add_cell(simplex(3), t2);
    return c;
}

/// Two triangles sharing exactly one vertex.
inline IndexedComplex pinwheel() {
    IndexedComplex c(2);
    const double p[5][2] = {{0, 0}, {-1, 1}, {-1, -1}, {1, 1}, {1, -1}};
    for (const auto& q : p) c.add_vertex(q);
    const index_t t1[3] = {0, 1, 2};
    const index_t t2[3] = {0, 3, 4};
    c.add_cell(simplex(2), t1);
    c.add_cell(simplex(2), t2);
    return c;
}

/// Three tetrahedra fanned around one shared triangle.
inline IndexedComplex three_tet_fan() {
    IndexedComplex c(3);
    const double p[6][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0},
                            {0, 0, 1}, {0, 0, -1}, {1, 1, 1}};
    for (const auto& q : p) c.add_vertex(q);
    const index_t t1[4] = {0, 1, 2, 3};
    const index_t t2[4] = {0, 1, 2, 4};
    const index_t t3[4] = {0, 1, 2, 5};
    c.add_cell(simplex(3), t1);
    c.add_cell(simplex(3), t2);
    c.add_cell(simplex(3), t3);
    return c;
}

/// Mixed census complex: three top edges, three top triangles, two top quads
/// and one top tetrahedron.
inline IndexedComplex mixed_complex() {
    IndexedComplex c(3);
    const double p[10][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 0, 0},
                             {2, 1, 0}, {3, 0, 0}, {3, 1, 0}, {4, 0, 0}, {4, 1, 1}};
    for (const auto& q : p) c.add_vertex(q);
    const index_t tet[4] = {0, 1, 2, 3};
    c.add_cell(simplex(3), tet);
    const index_t q1[4] = {1, 4, 5, 2};
    const index_t q2[4] = {4, 6, 7, 5};
    c.add_cell(cube(2), q1);
    c.add_cell(cube(2), q2);
    const index_t t1[3] = {6, 8, 7};
    const index_t t2[3] = {8, 9, 7};
    const index_t t3[3] = {2, 5, 3};
    c.add_cell(simplex(2), t1);
    c.add_cell(simplex(2), t2);
    c.add_cell(simplex(2), t3);
    const index_t e1[2] = {0, 4};
    const index_t e2[2] = {3, 9};
    const index_t e3[2] = {0, 9};
    c.add_cell(simplex(1), e1);
    c.add_cell(simplex(1), e2);
    c.add_cell(simplex(1), e3);
    return c;
}

/// Deterministic coordinate jitter, small enough to keep grid points apart.
inline void jitter(IndexedComplex& c, std::uint64_t seed, double amplitude = 0.3) {
    std::mt19937_64 rng(seed);
    for (double& x : c.raw_coords())
        x += amplitude * (static_cast<double>(rng() >> 11) * 0x1p-53 - 0.5);
}

/// Small randomized grid complex of a seed-chosen type.
inline IndexedComplex random_grid(std::uint64_t seed, count_t max_cells = 10000) {
    std::mt19937_64 rng(seed);
    const int type = static_cast<int>(rng() % 4);
    IndexedComplex c;
    switch (type) {
        case 0: {
            const int r = 2 + static_cast<int>(rng() % 40), q = 2 + static_cast<int>(rng() % 40);
            c = gen_tri_grid(r, q);
            break;
        }
        case 1: {
            const int r = 2 + static_cast<int>(rng() % 50), q = 2 + static_cast<int>(rng() % 50);
            c = gen_quad_grid(r, q);
            break;
        }
        case 2: {
            const int r = 2 + static_cast<int>(rng() % 8), q = 2 + static_cast<int>(rng() % 8),
                      s = 2 + static_cast<int>(rng() % 8);
            c = gen_tet_grid(r, q, s);
            break;
        }
        default: {
            const int r = 2 + static_cast<int>(rng() % 12), q = 2 + static_cast<int>(rng() % 12),
                      s = 2 + static_cast<int>(rng() % 12);
            c = gen_hex_grid(r, q, s);
            break;
        }
    }
    if (c.top_cell_count() > max_cells) return random_grid(seed + 101, max_cells);
    jitter(c, seed ^ 0x9e3779b97f4a7c15ull);
    return c;
}

// --- oracles ----------------------------------------------------------------

/// All p-cells of the complex by exhaustive enumeration over every top cell.
inline std::set<std::vector<index_t>> oracle_global_p_cells(const IndexedComplex& c, int p) {
    std::set<std::vector<index_t>> out;
    for (const auto& bucket : c.buckets()) {
        const CellKind kind = bucket.kind();
        for (index_t t = 0; t < bucket.size(); ++t) {
            if (kind.dim == p) {
                out.insert(canonical_tuple(bucket.verts(t)));
            } else if (kind.dim > p) {
                for (auto& f : boundary_faces(kind, bucket.verts(t), p))
                    out.insert(canonical_tuple(f));
            }
        }
    }
    return out;
}

/// Global R(0,k) over top k-cells by direct inversion of R(k,0).
inline std::map<index_t, std::set<TopCellRef>> oracle_vertex_coboundary(const IndexedComplex& c,
                                                                        int k) {
    std::map<index_t, std::set<TopCellRef>> out;
    for (std::uint32_t bi = 0; bi < c.buckets().size(); ++bi) {
        const auto& bucket = c.bucket(bi);
        if (bucket.kind().dim != k) continue;
        for (index_t t = 0; t < bucket.size(); ++t)
            for (index_t v : bucket.verts(t)) out[v].insert({bi, t});
    }
    return out;
}

/// Global face -> coface-list map over all top cells of dimension k.
inline std::map<std::vector<index_t>, std::vector<std::pair<TopCellRef, index_t>>>
oracle_face_cofaces(const IndexedComplex& c, int k) {
    std::map<std::vector<index_t>, std::vector<std::pair<TopCellRef, index_t>>> out;
    for (std::uint32_t bi = 0; bi < c.buckets().size(); ++bi) {
        const auto& bucket = c.bucket(bi);
        if (bucket.kind().dim != k) continue;
        for (index_t t = 0; t < bucket.size(); ++t) {
            auto faces = boundary_faces(bucket.kind(), bucket.verts(t), k - 1);
            for (index_t j = 0; j < static_cast<index_t>(faces.size()); ++j)
                out[canonical_tuple(faces[static_cast<std::size_t>(j)])].push_back({{bi, t}, j});
        }
    }
    return out;
}

/// Brute-force PhiTop: cells with at least one vertex in the leaf's set.
inline std::set<TopCellRef> oracle_phi_top(const IndexedComplex& c,
                                           const std::set<index_t>& leaf_verts) {
    std::set<TopCellRef> out;
    for (std::uint32_t bi = 0; bi < c.buckets().size(); ++bi) {
        const auto& bucket = c.bucket(bi);
        for (index_t t = 0; t < bucket.size(); ++t)
            for (index_t v : bucket.verts(t))
                if (leaf_verts.count(v)) {
                    out.insert({bi, t});
                    break;
                }
    }
    return out;
}

/// Vertex set of a leaf, independent of the encoding state.
inline std::set<index_t> leaf_vertex_set(const StellarTree& tree, index_t leaf) {
    std::set<index_t> out;
    const Block& b = tree.block(leaf);
    if (tree.vertices_reindexed()) {
        for (index_t v = b.v_start; v < b.v_end; ++v) out.insert(v);
    } else {
        out.insert(b.vertex_list.begin(), b.vertex_list.end());
    }
    return out;
}

/// Half-open point-in-box check with the root's upper faces closed.
inline bool oracle_point_in_leaf(const StellarTree& tree, index_t leaf,
                                 std::span<const double> x) {
    const BlockDomain d = tree.domain(leaf);
    const int n = tree.complex().ambient_dim();
    for (int a = 0; a < n; ++a) {
        if (x[a] < d.lower[a]) return false;
        const bool at_root_face = d.upper[a] == tree.root_upper()[a];
        if (at_root_face ? x[a] > d.upper[a] : x[a] >= d.upper[a]) return false;
    }
    return true;
}

/// Maximal cliques by power-set enumeration (tiny inputs only).
inline std::set<std::vector<index_t>> oracle_maximal_cliques(int n,
                                                             const std::set<std::pair<int, int>>& edges) {
    auto connected = [&](int a, int b) {
        return edges.count({std::min(a, b), std::max(a, b)}) > 0;
    };
    std::vector<std::vector<index_t>> cliques;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<index_t> members;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) members.push_back(i);
        bool clique = true;
        for (std::size_t i = 0; i < members.size() && clique; ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j)
                if (!connected(members[i], members[j])) {
                    clique = false;
                    break;
                }
        if (clique) cliques.push_back(members);
    }
    std::set<std::vector<index_t>> maximal;
    for (const auto& a : cliques) {
        bool contained = false;
        for (const auto& b : cliques) {
            if (a.size() >= b.size() || a == b) continue;
            if (std::includes(b.begin(), b.end(), a.begin(), a.end())) {
                contained = true;
                break;
            }
        }
        if (!contained && a.size() >= 2) maximal.insert(a);
    }
    return maximal;
}

/// Connected components of the star graph of one vertex (arcs between top
/// k-cells sharing a (k-1)-face), counted by flood fill.
inline count_t oracle_cluster_count(const IndexedComplex& c, index_t v, int k) {
    std::vector<TopCellRef> star;
    for (std::uint32_t bi = 0; bi < c.buckets().size(); ++bi) {
        const auto& bucket = c.bucket(bi);
        if (bucket.kind().dim != k) continue;
        for (index_t t = 0; t < bucket.size(); ++t) {
            const auto verts = bucket.verts(t);
            if (std::find(verts.begin(), verts.end(), v) != verts.end()) star.push_back({bi, t});
        }
    }
    if (star.empty()) return 0;
    auto share_facet = [&](TopCellRef a, TopCellRef b) {
        auto fa = boundary_faces(c.bucket(a.bucket).kind(), c.cell_verts(a), k - 1);
        auto fb = boundary_faces(c.bucket(b.bucket).kind(), c.cell_verts(b), k - 1);
        std::set<std::vector<index_t>> sa;
        for (auto& f : fa) sa.insert(canonical_tuple(f));
        for (auto& f : fb)
            if (sa.count(canonical_tuple(f))) return true;
        return false;
    };
    std::vector<int> comp(star.size(), -1);
    count_t n_comp = 0;
    for (std::size_t i = 0; i < star.size(); ++i) {
        if (comp[i] >= 0) continue;
        std::vector<std::size_t> stack{i};
        comp[i] = static_cast<int>(n_comp);
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < star.size(); ++j)
                if (comp[j] < 0 && share_facet(star[cur], star[j])) {
                    comp[j] = static_cast<int>(n_comp);
                    stack.push_back(j);
                }
        }
        ++n_comp;
    }
    return n_comp;
}

} // namespace testutil
