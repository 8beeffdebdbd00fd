#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stellar/cp_complex.hpp"
#include "stellar/decomposition.hpp"
#include "stellar/error.hpp"
#include "stellar/queries.hpp"

namespace stellar {

enum class GenMode : std::uint8_t { local = 0, global = 1 };

// ---------------------------------------------------------------------------
// half-edge structure
// ---------------------------------------------------------------------------

struct HalfEdgeRecord {
    index_t source = -1;   // source vertex
    TopCellRef face;       // bounding 2-cell on the left
    index_t next = -1;
    index_t prev = -1;
    index_t opposite = -1; // -1 exactly on boundary half-edges
};

/// Half-edge structure over a polygonal 2-complex: half-edge records plus
/// one-representative maps R*(2,he) per face and R*(0,he) per vertex.
struct HalfEdgeStructure {
    std::vector<HalfEdgeRecord> half_edges;
    std::map<TopCellRef, index_t> face_he;
    std::map<index_t, index_t> vertex_he;
    count_t paired_half_edges = 0;

    count_t boundary_half_edges() const {
        return static_cast<count_t>(half_edges.size()) - paired_half_edges;
    }

    /// Canonical view of the opposite pairing, independent of half-edge ids:
    /// per face (in cell order), the opposite face of each boundary edge slot
    /// or -1 on boundary. Used for cross-configuration comparisons.
    std::map<TopCellRef, std::vector<TopCellRef>> face_adjacency() const {
        std::map<TopCellRef, std::vector<TopCellRef>> out;
        for (const auto& [face, first] : face_he) {
            std::vector<TopCellRef> row;
            index_t he = first;
            do {
                const auto& rec = half_edges[static_cast<std::size_t>(he)];
                row.push_back(rec.opposite >= 0
                                  ? half_edges[static_cast<std::size_t>(rec.opposite)].face
                                  : TopCellRef{0, -1});
                he = rec.next;
            } while (he != first);
            out.emplace(face, std::move(row));
        }
        return out;
    }
};

namespace detail {

struct EdgeSlot {
    index_t he = -1; // waiting half-edge; -2 once the pair is sealed
};

class HalfEdgeBuilder {
public:
    explicit HalfEdgeBuilder(const IndexedComplex& complex) : complex_(&complex) {}

    void add_face(std::uint32_t bucket, index_t t, HalfEdgeStructure& out) {
        const auto verts = complex_->bucket(bucket).verts(t);
        const index_t m = static_cast<index_t>(verts.size());
        const index_t base = static_cast<index_t>(out.half_edges.size());
        for (index_t j = 0; j < m; ++j) {
            HalfEdgeRecord rec;
            rec.source = verts[static_cast<std::size_t>(j)];
            rec.face = {bucket, t};
            rec.next = base + (j + 1) % m;
            rec.prev = base + (j + m - 1) % m;
            out.half_edges.push_back(rec);
            out.face_he.try_emplace(rec.face, base + j);
            out.vertex_he.try_emplace(rec.source, base + j);
            pair_up(base + j, rec.source, verts[static_cast<std::size_t>((j + 1) % m)], out);
        }
    }

    std::size_t auxiliary_entries() const { return edge_he_.size(); }

private:
    void pair_up(index_t he, index_t v, index_t w, HalfEdgeStructure& out) {
        const auto key = std::minmax(v, w);
        auto [it, inserted] = edge_he_.try_emplace(key, detail::EdgeSlot{he});
        if (inserted) return;
        EdgeSlot& slot = it->second;
        require(slot.he != -2, errc::non_manifold_edge,
                "edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                    ") bounds more than two 2-cells");
        const index_t other = slot.he;
        require(out.half_edges[static_cast<std::size_t>(other)].source != v,
                errc::inconsistent_orientation,
                "edge (" + std::to_string(v) + "," + std::to_string(w) +
                    ") is traversed twice in the same direction");
        out.half_edges[static_cast<std::size_t>(he)].opposite = other;
        out.half_edges[static_cast<std::size_t>(other)].opposite = he;
        out.paired_half_edges += 2;
        slot.he = -2; // payload retired; reused only to catch a third half-edge
    }

    const IndexedComplex* complex_;
    std::map<std::pair<index_t, index_t>, EdgeSlot> edge_he_;
};

inline void require_two_complex(const IndexedComplex& complex) {
    for (const auto& bucket : complex.buckets())
        require(bucket.size() == 0 || bucket.kind().dim == 2, errc::precondition,
                "half-edge generation needs a complex of top 2-cells only");
}

} // namespace detail

struct HalfEdgeGenReport {
    HalfEdgeStructure structure; // global mode result
    count_t aux_peak_entries = 0;
    count_t leaves_processed = 0;
};

/// Global half-edge generation: every 2-cell is expanded exactly once, in the
/// leaf owning its minimum vertex index; opposites pair through a shared
/// edge map whose entries retire as soon as both half-edges are found.
inline HalfEdgeGenReport gen_halfedge_global(const StellarTree& tree) {
    detail::require_two_complex(tree.complex());
    HalfEdgeGenReport report;
    detail::HalfEdgeBuilder builder(tree.complex());
    for (index_t leaf : tree.leaf_order()) {
        const Block& b = tree.block(leaf);
        for (std::uint32_t bi = 0; bi < b.top_lists.size(); ++bi) {
            const auto& bucket = tree.complex().bucket(bi);
            b.top_lists[bi].for_each([&](index_t t) {
                const auto verts = bucket.verts(t);
                const index_t vmin = *std::min_element(verts.begin(), verts.end());
                if (!tree.leaf_contains_vertex(leaf, vmin)) return;
                builder.add_face(bi, t, report.structure);
            });
        }
        report.aux_peak_entries =
            std::max(report.aux_peak_entries, static_cast<count_t>(builder.auxiliary_entries()));
        ++report.leaves_processed;
    }
    return report;
}

/// Local half-edge generation: each leaf is expanded into its own structure
/// covering every 2-cell of PhiTop(B); cross-leaf opposites stay unpaired.
template <class Visitor> // void(index_t leaf, const HalfEdgeStructure&)
inline HalfEdgeGenReport gen_halfedge_local(const StellarTree& tree, Visitor&& visit) {
    detail::require_two_complex(tree.complex());
    HalfEdgeGenReport report;
    for (index_t leaf : tree.leaf_order()) {
        detail::HalfEdgeBuilder builder(tree.complex());
        HalfEdgeStructure local;
        const Block& b = tree.block(leaf);
        for (std::uint32_t bi = 0; bi < b.top_lists.size(); ++bi) {
            b.top_lists[bi].for_each([&](index_t t) { builder.add_face(bi, t, local); });
        }
        report.aux_peak_entries =
            std::max(report.aux_peak_entries, static_cast<count_t>(builder.auxiliary_entries()));
        ++report.leaves_processed;
        visit(leaf, local);
    }
    return report;
}

// ---------------------------------------------------------------------------
// IA / IA* structures
// ---------------------------------------------------------------------------

enum class SlotState : std::uint8_t {
    unknown = 0,      // not derivable (local mode, face with no vertex in the leaf)
    boundary = 1,
    adjacent = 2,
    non_manifold = 3, // coface list larger than two; see nm_cofaces
};

struct AdjacencySlot {
    SlotState state = SlotState::unknown;
    TopCellRef cell; // valid when state == adjacent

    bool operator==(const AdjacencySlot&) const = default;
};

/// Adjacency-based output structure. Covers the IA encoding on pseudo-
/// manifolds (adjacency plus one top cell per vertex) and the IA* extensions
/// on arbitrary CP complexes (per-dimension adjacency, non-manifold
/// co-boundary table, k-cluster vertex co-boundary, top-edge co-boundary).
struct IAStarStructure {
    // slots[bucket][cell * facet_count + j]; slot j corresponds to the j-th
    // (k-1)-face from boundary_faces
    std::vector<std::vector<AdjacencySlot>> slots;

    // R(k-1,k) for non-manifold faces, keyed by canonical face tuple
    std::map<std::vector<index_t>, std::vector<TopCellRef>> nm_cofaces;

    // R*(0,k): per dimension k, per vertex, one representative per k-cluster
    // (IA path: single first-in-scan representative)
    std::map<int, std::vector<std::vector<TopCellRef>>> vertex_reps;

    // R(0,1) over top 1-cells (IA* only)
    std::vector<std::vector<TopCellRef>> vertex_top_edges;

    count_t boundary_slots() const {
        count_t n = 0;
        for (const auto& bucket : slots)
            for (const auto& s : bucket)
                if (s.state == SlotState::boundary) ++n;
        return n;
    }

    count_t cluster_total(int k) const {
        auto it = vertex_reps.find(k);
        if (it == vertex_reps.end()) return 0;
        count_t n = 0;
        for (const auto& reps : it->second) n += reps.size();
        return n;
    }
};

struct IAGenReport {
    IAStarStructure structure;
    count_t aux_peak_entries = 0; // largest per-leaf face map
    count_t leaves_processed = 0;
};

namespace detail {

inline index_t facet_count(CellKind kind) {
    return static_cast<index_t>(boundary_face_count(kind, kind.dim - 1));
}

struct AdjacencyScratch {
    // canonical (k-1)-face tuple -> cofaces as (cell, slot)
    std::map<std::vector<index_t>, std::vector<std::pair<TopCellRef, index_t>>> face_cofaces;
};

/// Shared core of top-tops over one leaf and one cell dimension. In global
/// mode a face is skipped when its cofaces' slots are already initialized
/// (it was resolved in an earlier leaf); in local mode every face with a
/// vertex in the leaf is processed, and writes are idempotent.
inline void leaf_adjacency_pass(const StellarTree& tree, index_t leaf, int dim, GenMode mode,
                                bool strict_manifold, IAStarStructure& out,
                                AdjacencyScratch& scratch) {
    const auto& complex = tree.complex();
    const Block& b = tree.block(leaf);
    scratch.face_cofaces.clear();

    for (std::uint32_t bi = 0; bi < complex.buckets().size(); ++bi) {
        const auto& bucket = complex.bucket(bi);
        const CellKind kind = bucket.kind();
        if (kind.dim != dim || bucket.size() == 0) continue;
        const index_t fcount = facet_count(kind);
        b.top_lists[bi].for_each([&](index_t t) {
            auto faces = boundary_faces(kind, bucket.verts(t), dim - 1);
            for (index_t j = 0; j < static_cast<index_t>(faces.size()); ++j) {
                if (mode == GenMode::global &&
                    out.slots[bi][static_cast<std::size_t>(t) * fcount + j].state !=
                        SlotState::unknown)
                    continue;
                bool in_leaf = false;
                for (index_t v : faces[static_cast<std::size_t>(j)])
                    if (tree.leaf_contains_vertex(leaf, v)) {
                        in_leaf = true;
                        break;
                    }
                if (!in_leaf) continue; // not derivable from this leaf
                scratch.face_cofaces[canonical_tuple(faces[static_cast<std::size_t>(j)])]
                    .push_back({{bi, t}, j});
            }
        });
    }

    for (auto& [face, cofaces] : scratch.face_cofaces) {
        auto slot_of = [&](std::size_t i) -> AdjacencySlot& {
            const auto [cell, j] = cofaces[i];
            const index_t fcount = facet_count(complex.bucket(cell.bucket).kind());
            return out.slots[cell.bucket]
                            [static_cast<std::size_t>(cell.index) * fcount +
                             static_cast<std::size_t>(j)];
        };
        if (cofaces.size() == 1) {
            slot_of(0) = {SlotState::boundary, {}};
        } else if (cofaces.size() == 2) {
            slot_of(0) = {SlotState::adjacent, cofaces[1].first};
            slot_of(1) = {SlotState::adjacent, cofaces[0].first};
        } else {
            require(!strict_manifold, errc::pseudo_manifold_violation,
                    "a (k-1)-face has " + std::to_string(cofaces.size()) + " cofaces");
            std::vector<TopCellRef> cells;
            cells.reserve(cofaces.size());
            for (std::size_t i = 0; i < cofaces.size(); ++i) {
                slot_of(i) = {SlotState::non_manifold, {}};
                cells.push_back(cofaces[i].first);
            }
            std::sort(cells.begin(), cells.end());
            out.nm_cofaces[face] = std::move(cells);
        }
    }
}

/// Union-find clustering of the restricted star of each leaf vertex:
/// star cells are joined when they share a (k-1)-face, and the smallest cell
/// reference of each component is kept as its representative.
inline void leaf_cluster_pass(const StellarTree& tree, ExpandedLeaf& eleaf, int dim,
                              IAStarStructure& out) {
    const auto& complex = tree.complex();
    auto& reps_by_vertex = out.vertex_reps[dim];
    if (reps_by_vertex.empty())
        reps_by_vertex.resize(static_cast<std::size_t>(complex.vertex_count()));

    const auto& star_lists = eleaf.restricted_vertex_coboundary(dim);
    std::vector<index_t> uf_parent;
    std::map<std::vector<index_t>, index_t> face_owner;

    for (index_t slot = 0; slot < eleaf.local_vertex_count(); ++slot) {
        const auto& star = star_lists[static_cast<std::size_t>(slot)];
        if (star.empty()) continue;
        uf_parent.assign(star.size(), 0);
        std::iota(uf_parent.begin(), uf_parent.end(), 0);
        auto find = [&](index_t x) {
            while (uf_parent[static_cast<std::size_t>(x)] != x) {
                uf_parent[static_cast<std::size_t>(x)] =
                    uf_parent[static_cast<std::size_t>(uf_parent[static_cast<std::size_t>(x)])];
                x = uf_parent[static_cast<std::size_t>(x)];
            }
            return x;
        };
        face_owner.clear();
        for (index_t i = 0; i < static_cast<index_t>(star.size()); ++i) {
            const auto cell = star[static_cast<std::size_t>(i)];
            const CellKind kind = complex.bucket(cell.bucket).kind();
            for (auto& face : boundary_faces(kind, complex.cell_verts(cell), dim - 1)) {
                auto key = canonical_tuple(face);
                auto [it, inserted] = face_owner.try_emplace(std::move(key), i);
                if (!inserted) uf_parent[static_cast<std::size_t>(find(i))] = find(it->second);
            }
        }
        std::map<index_t, TopCellRef> cluster_min;
        for (index_t i = 0; i < static_cast<index_t>(star.size()); ++i) {
            const index_t root = find(i);
            auto [it, inserted] = cluster_min.try_emplace(root, star[static_cast<std::size_t>(i)]);
            if (!inserted) it->second = std::min(it->second, star[static_cast<std::size_t>(i)]);
        }
        auto& reps = reps_by_vertex[static_cast<std::size_t>(eleaf.vertex_at_slot(slot))];
        for (const auto& [root, rep] : cluster_min) reps.push_back(rep);
        std::sort(reps.begin(), reps.end());
    }
}

} // namespace detail

/// Partial adjacency reconstructed from a single leaf: R(d,d) over the
/// cells of PhiTop(B) across every (d-1)-face with a vertex in PhiVert(B),
/// with boundary marks. Slots not derivable inside the leaf stay unknown.
inline IAStarStructure extract_adjacency_manifold(const StellarTree& tree, index_t leaf,
                                                  bool strict_manifold = true) {
    const auto& complex = tree.complex();
    IAStarStructure out;
    out.slots.resize(complex.buckets().size());
    std::vector<int> dims;
    for (std::uint32_t bi = 0; bi < complex.buckets().size(); ++bi) {
        const auto& bucket = complex.bucket(bi);
        if (bucket.size() == 0) continue;
        out.slots[bi].assign(static_cast<std::size_t>(bucket.size()) *
                                 static_cast<std::size_t>(detail::facet_count(bucket.kind())),
                             AdjacencySlot{});
        if (std::find(dims.begin(), dims.end(), bucket.kind().dim) == dims.end())
            dims.push_back(bucket.kind().dim);
    }
    detail::AdjacencyScratch scratch;
    for (int k : dims)
        detail::leaf_adjacency_pass(tree, leaf, k, GenMode::local, strict_manifold, out, scratch);
    return out;
}

/// IA generation over a pure pseudo-manifold complex: complete R(d,d) with
/// boundary marks, plus one first-in-scan top d-cell per vertex. Global mode
/// resolves every slot; local mode leaves faces with no vertex in the leaf
/// marked unknown within that leaf's pass.
inline IAGenReport gen_ia(const StellarTree& tree, GenMode mode) {
    const auto& complex = tree.complex();
    const int d = complex.complex_dim();
    require(d >= 1, errc::precondition, "IA generation needs top cells");
    for (const auto& bucket : complex.buckets())
        require(bucket.size() == 0 || bucket.kind().dim == d, errc::precondition,
                "IA generation needs a pure complex");

    IAGenReport report;
    report.structure.slots.resize(complex.buckets().size());
    for (std::uint32_t bi = 0; bi < complex.buckets().size(); ++bi) {
        const auto& bucket = complex.bucket(bi);
        if (bucket.size() == 0) continue;
        report.structure.slots[bi].assign(
            static_cast<std::size_t>(bucket.size()) *
                static_cast<std::size_t>(detail::facet_count(bucket.kind())),
            AdjacencySlot{});
    }
    auto& reps = report.structure.vertex_reps[d];
    reps.resize(static_cast<std::size_t>(complex.vertex_count()));

    detail::AdjacencyScratch scratch;
    for (index_t leaf : tree.leaf_order()) {
        detail::leaf_adjacency_pass(tree, leaf, d, mode, /*strict_manifold=*/true,
                                    report.structure, scratch);
        report.aux_peak_entries =
            std::max(report.aux_peak_entries, static_cast<count_t>(scratch.face_cofaces.size()));
        ++report.leaves_processed;

        // R*(0,d): first top cell met in scan order over the leaf's lists
        const Block& b = tree.block(leaf);
        for (std::uint32_t bi = 0; bi < complex.buckets().size(); ++bi) {
            const auto& bucket = complex.bucket(bi);
            b.top_lists[bi].for_each([&](index_t t) {
                for (index_t v : bucket.verts(t)) {
                    if (!tree.leaf_contains_vertex(leaf, v)) continue;
                    auto& rep = reps[static_cast<std::size_t>(v)];
                    if (rep.empty()) rep.push_back({bi, t});
                }
            });
        }
    }
    return report;
}

/// IA* generation over an arbitrary CP complex: per-dimension adjacency with
/// non-manifold routing, per-vertex k-cluster representatives, and the top
/// 1-cell co-boundary.
inline IAGenReport gen_iastar(const StellarTree& tree, GenMode mode) {
    const auto& complex = tree.complex();
    IAGenReport report;
    report.structure.slots.resize(complex.buckets().size());
    std::vector<int> dims;
    for (std::uint32_t bi = 0; bi < complex.buckets().size(); ++bi) {
        const auto& bucket = complex.bucket(bi);
        if (bucket.size() == 0) continue;
        report.structure.slots[bi].assign(
            static_cast<std::size_t>(bucket.size()) *
                static_cast<std::size_t>(detail::facet_count(bucket.kind())),
            AdjacencySlot{});
        if (std::find(dims.begin(), dims.end(), bucket.kind().dim) == dims.end())
            dims.push_back(bucket.kind().dim);
    }
    std::sort(dims.begin(), dims.end());
    report.structure.vertex_top_edges.resize(static_cast<std::size_t>(complex.vertex_count()));

    detail::AdjacencyScratch scratch;
    for (index_t leaf : tree.leaf_order()) {
        ExpandedLeaf eleaf(tree, leaf);
        for (int k : dims) {
            detail::leaf_adjacency_pass(tree, leaf, k, mode, /*strict_manifold=*/false,
                                        report.structure, scratch);
            report.aux_peak_entries = std::max(report.aux_peak_entries,
                                               static_cast<count_t>(scratch.face_cofaces.size()));
            if (k == 1) {
                // R(0,1): all top 1-cells incident in each leaf vertex
                const auto& star_lists = eleaf.restricted_vertex_coboundary(1);
                for (index_t slot = 0; slot < eleaf.local_vertex_count(); ++slot) {
                    const auto v = eleaf.vertex_at_slot(slot);
                    report.structure.vertex_top_edges[static_cast<std::size_t>(v)] =
                        star_lists[static_cast<std::size_t>(slot)];
                }
            } else {
                detail::leaf_cluster_pass(tree, eleaf, k, report.structure);
            }
        }
        ++report.leaves_processed;
    }
    return report;
}

} // namespace stellar
