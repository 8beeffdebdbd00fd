#pragma once

#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stellar/cp_complex.hpp"
#include "stellar/decomposition.hpp"
#include "stellar/error.hpp"

namespace stellar {

namespace detail {
struct TupleKeyHash {
    std::size_t operator()(const std::vector<index_t>& t) const {
        std::size_t h = 1469598103934665603ull;
        for (index_t v : t) {
            h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(v));
            h *= 1099511628211ull;
        }
        return h;
    }
};
} // namespace detail

/// Distinct p-cells found inside one leaf. Local indices are dense, assigned
/// in first-encounter order. Every stored p-cell has at least one vertex in
/// the leaf's vertex map. Alongside the canonical tuple (relation R(p,0)),
/// the first-encountered structural tuple and kind are kept so that boundary
/// enumeration can recurse into cube faces.
struct PCellSet {
    std::unordered_map<std::vector<index_t>, index_t, detail::TupleKeyHash> index_of;
    std::vector<std::vector<index_t>> canonical; // local id -> sorted tuple
    std::vector<std::vector<index_t>> structural; // local id -> tuple in cell order
    std::vector<CellKind> kinds;

    index_t size() const { return static_cast<index_t>(canonical.size()); }
};

/// Budget guard for batched extraction; 1e8 projected faces per leaf per
/// extraction by default.
struct QueryBudget {
    double max_projected_faces = 1e8;
};

/// Expanded leaf-block representation: the transient, application-defined
/// topological view of a single leaf. Relations are built on first request
/// and memoized, so a cached ExpandedLeaf amortizes repeated passes.
class ExpandedLeaf {
public:
    ExpandedLeaf(const StellarTree& tree, index_t leaf, QueryBudget budget = {})
        : tree_(&tree), leaf_(leaf), budget_(budget) {
        const Block& b = tree.block(leaf);
        if (tree.vertices_reindexed()) {
            first_vertex_ = b.v_start;
            local_vertices_ = static_cast<index_t>(b.v_end - b.v_start);
        } else {
            local_vertices_ = static_cast<index_t>(b.vertex_list.size());
            for (index_t i = 0; i < local_vertices_; ++i)
                slot_of_[b.vertex_list[static_cast<std::size_t>(i)]] = i;
        }
    }

    const StellarTree& tree() const { return *tree_; }
    index_t leaf() const { return leaf_; }
    index_t local_vertex_count() const { return local_vertices_; }

    /// Local slot of a leaf vertex: the offset in [v_start, v_end) once the
    /// tree is compressed, the position in the explicit list otherwise.
    index_t vertex_slot(index_t v) const {
        if (tree_->vertices_reindexed()) return v - first_vertex_;
        auto it = slot_of_.find(v);
        require(it != slot_of_.end(), errc::index_range, "vertex not in this leaf");
        return it->second;
    }

    index_t vertex_at_slot(index_t slot) const {
        if (tree_->vertices_reindexed()) return first_vertex_ + slot;
        return tree_->block(leaf_).vertex_list[static_cast<std::size_t>(slot)];
    }

    bool contains_vertex(index_t v) const { return tree_->leaf_contains_vertex(leaf_, v); }

    /// Distinct p-cells of the leaf: every p-face (by canonical tuple) of any
    /// top cell in PhiTop(B) having at least one vertex in PhiVert(B). Top
    /// p-cells count as their own p-cells.
    const PCellSet& p_cells(int p) {
        auto it = p_cells_.find(p);
        if (it != p_cells_.end()) return it->second;
        require(p > 0, errc::dimension, "p-cell extraction needs p > 0");
        check_budget(p);

        PCellSet set;
        const auto& complex = tree_->complex();
        const Block& b = tree_->block(leaf_);
        for (std::uint32_t bi = 0; bi < complex.buckets().size(); ++bi) {
            const auto& bucket = complex.bucket(bi);
            const CellKind kind = bucket.kind();
            if (kind.dim < p) continue;
            b.top_lists[bi].for_each([&](index_t t) {
                const auto verts = bucket.verts(t);
                if (kind.dim == p) {
                    intern(set, kind, std::vector<index_t>(verts.begin(), verts.end()));
                    return;
                }
                for (auto& face : boundary_faces(kind, verts, p)) {
                    const CellKind face_kind =
                        kind.family == CellFamily::simplex ? simplex(p) : cube(p);
                    intern(set, face_kind, std::move(face));
                }
            });
        }
        return p_cells_.emplace(p, std::move(set)).first->second;
    }

    /// Restricted vertex co-boundary R(0,k) over top k-cells: for every leaf
    /// vertex, the top k-cells of PhiTop(B) incident in it, in scan order.
    const std::vector<std::vector<TopCellRef>>& restricted_vertex_coboundary(int k) {
        auto it = restricted_.find(k);
        if (it != restricted_.end()) return it->second;

        std::vector<std::vector<TopCellRef>> lists(static_cast<std::size_t>(local_vertices_));
        const auto& complex = tree_->complex();
        const Block& b = tree_->block(leaf_);
        for (std::uint32_t bi = 0; bi < complex.buckets().size(); ++bi) {
            const auto& bucket = complex.bucket(bi);
            if (bucket.kind().dim != k) continue;
            b.top_lists[bi].for_each([&](index_t t) {
                for (index_t v : bucket.verts(t))
                    if (contains_vertex(v))
                        lists[static_cast<std::size_t>(vertex_slot(v))].push_back({bi, t});
            });
        }
        return restricted_.emplace(k, std::move(lists)).first->second;
    }

    /// Full vertex co-boundary R(0,p) over all p-cells (top and non-top),
    /// per local vertex slot, as local p-cell indices.
    const std::vector<std::vector<index_t>>& vertex_coboundary_all_p(int p) {
        auto it = all_p_cb_.find(p);
        if (it != all_p_cb_.end()) return it->second;
        const PCellSet& cells = p_cells(p);
        std::vector<std::vector<index_t>> lists(static_cast<std::size_t>(local_vertices_));
        for (index_t id = 0; id < cells.size(); ++id) {
            for (index_t v : cells.canonical[static_cast<std::size_t>(id)])
                if (contains_vertex(v)) lists[static_cast<std::size_t>(vertex_slot(v))].push_back(id);
        }
        return all_p_cb_.emplace(p, std::move(lists)).first->second;
    }

    /// General co-boundary R(p,q), p < q: q-cells are extracted with their
    /// p-boundary and the relation is inverted. Sources are local p-cell
    /// indices (local vertex slots when p = 0); targets are local q-cell
    /// indices.
    const std::vector<std::vector<index_t>>& general_coboundary(int p, int q) {
        auto it = general_cb_.find({p, q});
        if (it != general_cb_.end()) return it->second;
        require(0 <= p && p < q, errc::dimension, "general_coboundary needs 0 <= p < q");

        const PCellSet& q_cells = p_cells(q);
        const index_t sources = p == 0 ? local_vertices_ : p_cells(p).size();
        std::vector<std::vector<index_t>> lists(static_cast<std::size_t>(sources));

        for (index_t qi = 0; qi < q_cells.size(); ++qi) {
            const auto& structural = q_cells.structural[static_cast<std::size_t>(qi)];
            const CellKind q_kind = q_cells.kinds[static_cast<std::size_t>(qi)];
            if (p == 0) {
                for (index_t v : structural)
                    if (contains_vertex(v))
                        lists[static_cast<std::size_t>(vertex_slot(v))].push_back(qi);
                continue;
            }
            const PCellSet& p_set = p_cells(p);
            for (auto& face : boundary_faces(q_kind, structural, p)) {
                auto key = canonical_tuple(face);
                auto pit = p_set.index_of.find(key);
                if (pit == p_set.index_of.end()) continue; // p-face outside the leaf's scope
                lists[static_cast<std::size_t>(pit->second)].push_back(qi);
            }
        }
        return general_cb_.emplace(std::pair<int, int>{p, q}, std::move(lists)).first->second;
    }

private:
    void intern(PCellSet& set, CellKind kind, std::vector<index_t>&& tuple) {
        bool in_leaf = false;
        for (index_t v : tuple)
            if (contains_vertex(v)) {
                in_leaf = true;
                break;
            }
        if (!in_leaf) return;
        auto key = canonical_tuple(tuple);
        auto [it, inserted] = set.index_of.try_emplace(std::move(key), set.size());
        if (!inserted) return;
        set.canonical.push_back(std::vector<index_t>(it->first));
        set.structural.push_back(std::move(tuple));
        set.kinds.push_back(kind);
    }

    void check_budget(int p) const {
        const auto& complex = tree_->complex();
        const Block& b = tree_->block(leaf_);
        double projected = 0;
        for (std::uint32_t bi = 0; bi < complex.buckets().size(); ++bi) {
            const CellKind kind = complex.bucket(bi).kind();
            if (kind.dim < p) continue;
            const double per_cell =
                kind.dim == p ? 1.0 : static_cast<double>(boundary_face_count(kind, p));
            projected += per_cell * static_cast<double>(b.top_lists[bi].size());
        }
        require(projected <= budget_.max_projected_faces, errc::capacity,
                "p-cell extraction would enumerate " + std::to_string(projected) +
                    " faces, over the configured budget");
    }

    const StellarTree* tree_;
    index_t leaf_;
    QueryBudget budget_;
    index_t first_vertex_ = 0;
    index_t local_vertices_ = 0;
    std::unordered_map<index_t, index_t> slot_of_; // explicit encoding only

    std::map<int, PCellSet> p_cells_;
    std::map<int, std::vector<std::vector<TopCellRef>>> restricted_;
    std::map<int, std::vector<std::vector<index_t>>> all_p_cb_;
    std::map<std::pair<int, int>, std::vector<std::vector<index_t>>> general_cb_;
};

/// Fixed-size LRU cache of expanded leaves. Capacity 0 disables retention:
/// each fetch expands into a scratch slot. Query results never depend on the
/// capacity; only the expansion count does.
class LeafCache {
public:
    explicit LeafCache(std::size_t capacity, QueryBudget budget = {})
        : capacity_(capacity), budget_(budget) {}

    ExpandedLeaf& fetch(const StellarTree& tree, index_t leaf) {
        auto it = lookup_.find(leaf);
        if (it != lookup_.end()) {
            ++hits_;
            entries_.splice(entries_.begin(), entries_, it->second);
            return it->second->second;
        }
        ++expansions_;
        if (capacity_ == 0) {
            scratch_.emplace(tree, leaf, budget_);
            return *scratch_;
        }
        if (entries_.size() >= capacity_) {
            lookup_.erase(entries_.back().first);
            entries_.pop_back();
        }
        entries_.emplace_front(leaf, ExpandedLeaf(tree, leaf, budget_));
        lookup_[leaf] = entries_.begin();
        return entries_.front().second;
    }

    std::size_t capacity() const { return capacity_; }
    count_t hits() const { return hits_; }
    count_t expansions() const { return expansions_; }
    std::size_t resident() const { return entries_.size(); }

private:
    std::size_t capacity_;
    QueryBudget budget_;
    std::list<std::pair<index_t, ExpandedLeaf>> entries_; // front = most recent
    std::unordered_map<index_t, std::list<std::pair<index_t, ExpandedLeaf>>::iterator> lookup_;
    std::optional<ExpandedLeaf> scratch_;
    count_t hits_ = 0;
    count_t expansions_ = 0;
};

/// Streams every leaf through the kernel in depth-first order, reusing
/// cached expansions. Kernel failures are rethrown with the leaf attached.
template <class Kernel>
inline void visit_leaves(const StellarTree& tree, LeafCache& cache, Kernel&& kernel) {
    for (index_t leaf : tree.leaf_order()) {
        ExpandedLeaf& e = cache.fetch(tree, leaf);
        try {
            kernel(e);
        } catch (const error& err) {
            throw error(err.code(),
                        "leaf " + std::to_string(leaf) + ": " + err.what());
        }
    }
}

} // namespace stellar
