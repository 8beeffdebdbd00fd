#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stellar/cp_complex.hpp"
#include "stellar/error.hpp"
#include "stellar/sre.hpp"

namespace stellar {

enum class SplitMode : std::uint8_t { quadtree = 0, kd = 1 };
enum class EncodingMode : std::uint8_t { explicit_lists = 0, vertex_compressed = 1, compressed = 2 };

inline const char* split_mode_name(SplitMode m) { return m == SplitMode::quadtree ? "quad" : "kd"; }
inline const char* encoding_mode_name(EncodingMode m) {
    switch (m) {
        case EncodingMode::explicit_lists: return "explicit";
        case EncodingMode::vertex_compressed: return "vertex_compressed";
        case EncodingMode::compressed: return "compressed";
    }
    return "?";
}

/// Bucketing threshold sentinel: the root indexes the entire complex.
inline constexpr count_t kv_infinite = std::numeric_limits<count_t>::max();

/// Axis-aligned block extent, reconstructed from split planes on demand.
struct BlockDomain {
    std::vector<double> lower;
    std::vector<double> upper;
};

/// One node of the containment hierarchy. Internal blocks reference their
/// brood (contiguous group of children) through a single index; leaves carry
/// the vertex map (explicit list before reindexing, [v_start, v_end) after)
/// and one top-cell list per complex bucket.
struct Block {
    index_t parent = -1;
    index_t brood = -1;                 // first child id; -1 for leaves
    index_t v_start = -1, v_end = -1;   // contiguous vertex range once reindexed
    std::vector<index_t> vertex_list;   // leaf only, until folded into the range
    std::vector<SreList> top_lists;     // leaf only, parallel to complex buckets
    bool materialized = false;          // empty leaves stay unmaterialized

    bool is_leaf() const { return brood < 0; }
    count_t vertex_count() const {
        return v_start >= 0 ? static_cast<count_t>(v_end - v_start)
                            : static_cast<count_t>(vertex_list.size());
    }
};

/// Stellar tree: an indexed CP complex, a nested half-open spatial
/// decomposition of its vertices driven by the bucketing threshold kv, and
/// per-leaf maps to vertices and top cells.
class StellarTree {
public:
    StellarTree() = default;

    const IndexedComplex& complex() const { return complex_; }
    IndexedComplex& complex() { return complex_; }

    count_t kv() const { return kv_; }
    SplitMode split_mode() const { return split_mode_; }
    EncodingMode encoding_mode() const { return encoding_; }
    void set_encoding_mode(EncodingMode m) { encoding_ = m; }
    int max_depth() const { return max_depth_; }
    bool vertices_reindexed() const { return vertices_reindexed_; }

    const std::vector<Block>& blocks() const { return blocks_; }
    std::vector<Block>& blocks() { return blocks_; }
    const Block& block(index_t id) const { return blocks_[static_cast<std::size_t>(id)]; }
    Block& block(index_t id) { return blocks_[static_cast<std::size_t>(id)]; }
    index_t root() const { return 0; }

    std::span<const double> root_lower() const { return root_lower_; }
    std::span<const double> root_upper() const { return root_upper_; }

    int children_per_brood() const {
        return split_mode_ == SplitMode::quadtree ? (1 << complex_.ambient_dim()) : 2;
    }

    /// Materialized leaves in depth-first order.
    std::vector<index_t> leaves() const {
        std::vector<index_t> out;
        walk(root(), [&](index_t id) { out.push_back(id); });
        return out;
    }

    template <class F>
    void walk(index_t id, F&& on_leaf) const {
        const Block& b = block(id);
        if (!b.materialized) return;
        if (b.is_leaf()) {
            on_leaf(id);
            return;
        }
        const int cn = children_per_brood();
        for (int s = 0; s < cn; ++s) walk(b.brood + s, on_leaf);
    }

    /// Leaf vertex membership, valid in every encoding state.
    bool leaf_contains_vertex(index_t leaf, index_t v) const {
        const Block& b = block(leaf);
        if (vertices_reindexed_) return v >= b.v_start && v < b.v_end;
        return v >= 0 && static_cast<std::size_t>(v) < vertex_leaf_.size() &&
               vertex_leaf_[static_cast<std::size_t>(v)] == leaf;
    }

    /// Leaf that indexes vertex v.
    index_t leaf_of_vertex(index_t v) const {
        require(v >= 0 && v < complex_.vertex_count(), errc::index_range, "vertex out of range");
        if (!vertices_reindexed_) return vertex_leaf_[static_cast<std::size_t>(v)];
        // leaf ranges partition [0,|V|) in depth-first order
        auto it = std::upper_bound(leaf_order_.begin(), leaf_order_.end(), v,
                                   [&](index_t value, index_t leaf) { return value < block(leaf).v_start; });
        return *(it - 1);
    }

    /// Depth-first leaf ids; after vertex reindexing their ranges ascend.
    const std::vector<index_t>& leaf_order() const { return leaf_order_; }

    /// Per-vertex leaf assignment (old indices); cleared by reindexing.
    const std::vector<index_t>& vertex_leaf() const { return vertex_leaf_; }

    /// Reconstructs a block's half-open domain by replaying split planes from
    /// the root. Domains are never stored.
    BlockDomain domain(index_t id) const {
        std::vector<std::pair<index_t, int>> path; // (block, slot in parent brood)
        index_t cur = id;
        while (blocks_[static_cast<std::size_t>(cur)].parent >= 0) {
            const index_t par = blocks_[static_cast<std::size_t>(cur)].parent;
            path.push_back({cur, static_cast<int>(cur - blocks_[static_cast<std::size_t>(par)].brood)});
            cur = par;
        }
        BlockDomain d{root_lower_, root_upper_};
        const int n = complex_.ambient_dim();
        int depth = 0;
        for (auto it = path.rbegin(); it != path.rend(); ++it, ++depth) {
            const int slot = it->second;
            if (split_mode_ == SplitMode::quadtree) {
                for (int a = 0; a < n; ++a) {
                    const double mid = 0.5 * (d.lower[a] + d.upper[a]);
                    if ((slot >> a) & 1)
                        d.lower[a] = mid;
                    else
                        d.upper[a] = mid;
                }
            } else {
                const int a = depth % n;
                const double mid = 0.5 * (d.lower[a] + d.upper[a]);
                if (slot & 1)
                    d.lower[a] = mid;
                else
                    d.upper[a] = mid;
            }
        }
        return d;
    }

    int depth_of(index_t id) const {
        int depth = 0;
        while (block(id).parent >= 0) {
            id = block(id).parent;
            ++depth;
        }
        return depth;
    }

    /// Unique leaf whose half-open domain contains the point. Points on a
    /// split plane belong to the upper side; the root's upper faces count as
    /// closed.
    index_t locate_leaf(std::span<const double> point) const {
        const int n = complex_.ambient_dim();
        require(static_cast<int>(point.size()) == n, errc::parameter, "point dimension mismatch");
        for (int a = 0; a < n; ++a)
            require(point[a] >= root_lower_[a] && point[a] <= root_upper_[a], errc::out_of_domain,
                    "point outside the root domain");
        index_t cur = root();
        std::vector<double> lo = root_lower_, hi = root_upper_;
        int depth = 0;
        while (!block(cur).is_leaf()) {
            int slot = 0;
            if (split_mode_ == SplitMode::quadtree) {
                for (int a = 0; a < n; ++a) {
                    const double mid = 0.5 * (lo[a] + hi[a]);
                    if (point[a] >= mid) {
                        slot |= (1 << a);
                        lo[a] = mid;
                    } else {
                        hi[a] = mid;
                    }
                }
            } else {
                const int a = depth % n;
                const double mid = 0.5 * (lo[a] + hi[a]);
                if (point[a] >= mid) {
                    slot = 1;
                    lo[a] = mid;
                } else {
                    slot = 0;
                    hi[a] = mid;
                }
            }
            cur = block(cur).brood + slot;
            ++depth;
        }
        return cur;
    }

    // --- mutation hooks used by the build and reindex pipeline ---

    friend StellarTree build_hierarchy(IndexedComplex&& complex, count_t kv, SplitMode mode,
                                       int max_depth);
    friend void insert_top_cells(StellarTree& tree);

    void refresh_leaf_order() {
        leaf_order_.clear();
        walk(root(), [&](index_t id) { leaf_order_.push_back(id); });
    }

    void mark_vertices_reindexed() {
        vertices_reindexed_ = true;
        vertex_leaf_.clear();
        vertex_leaf_.shrink_to_fit();
    }

    void set_build_metadata(count_t kv, SplitMode split, int max_depth,
                            std::vector<double> lower, std::vector<double> upper) {
        kv_ = kv;
        split_mode_ = split;
        max_depth_ = max_depth;
        root_lower_ = std::move(lower);
        root_upper_ = std::move(upper);
    }

    void set_vertex_leaf(std::vector<index_t> vl) { vertex_leaf_ = std::move(vl); }

private:
    IndexedComplex complex_;
    std::vector<Block> blocks_;
    std::vector<index_t> leaf_order_;
    std::vector<index_t> vertex_leaf_;
    std::vector<double> root_lower_, root_upper_;
    count_t kv_ = kv_infinite;
    SplitMode split_mode_ = SplitMode::quadtree;
    EncodingMode encoding_ = EncodingMode::explicit_lists;
    int max_depth_ = 64;
    bool vertices_reindexed_ = false;
};

inline SplitMode auto_split_mode(int ambient_dim) {
    return ambient_dim <= 6 ? SplitMode::quadtree : SplitMode::kd;
}

namespace detail {

class TreeBuilder {
public:
    TreeBuilder(StellarTree& tree, count_t kv, int max_depth)
        : tree_(tree), kv_(kv) {
        const int n = tree.complex().ambient_dim();
        max_total_depth_ = tree.split_mode() == SplitMode::quadtree ? max_depth : max_depth * n;
    }

    void run() {
        auto& blocks = tree_.blocks();
        blocks.clear();
        blocks.push_back(Block{});
        blocks[0].materialized = true;
        const index_t nv = tree_.complex().vertex_count();
        std::vector<index_t> vertex_leaf(static_cast<std::size_t>(nv), -1);
        for (index_t v = 0; v < nv; ++v) insert_vertex(v, vertex_leaf);
        tree_.set_vertex_leaf(std::move(vertex_leaf));
        tree_.refresh_leaf_order();
    }

private:
    void insert_vertex(index_t v, std::vector<index_t>& vertex_leaf) {
        const auto point = tree_.complex().vertex(v);
        index_t cur = tree_.root();
        std::vector<double> lo(tree_.root_lower().begin(), tree_.root_lower().end());
        std::vector<double> hi(tree_.root_upper().begin(), tree_.root_upper().end());
        int depth = 0;
        descend(cur, lo, hi, depth, point);
        Block& leaf = tree_.block(cur);
        leaf.materialized = true;
        leaf.vertex_list.push_back(v);
        vertex_leaf[static_cast<std::size_t>(v)] = cur;
        maybe_split(cur, lo, hi, depth, vertex_leaf);
    }

    void descend(index_t& cur, std::vector<double>& lo, std::vector<double>& hi, int& depth,
                 std::span<const double> point) const {
        const int n = tree_.complex().ambient_dim();
        while (!tree_.block(cur).is_leaf()) {
            int slot = 0;
            if (tree_.split_mode() == SplitMode::quadtree) {
                for (int a = 0; a < n; ++a) {
                    const double mid = 0.5 * (lo[a] + hi[a]);
                    if (point[a] >= mid) {
                        slot |= (1 << a);
                        lo[a] = mid;
                    } else {
                        hi[a] = mid;
                    }
                }
            } else {
                const int a = depth % n;
                const double mid = 0.5 * (lo[a] + hi[a]);
                if (point[a] >= mid) {
                    slot = 1;
                    lo[a] = mid;
                } else {
                    hi[a] = mid;
                }
            }
            cur = tree_.block(cur).brood + slot;
            ++depth;
        }
    }

    void maybe_split(index_t id, const std::vector<double>& lo, const std::vector<double>& hi,
                     int depth, std::vector<index_t>& vertex_leaf) {
        if (kv_ == kv_infinite) return;
        if (tree_.block(id).vertex_list.size() <= kv_) return;
        if (depth >= max_total_depth_) return; // coincident points: leaf may exceed kv
        split(id, lo, hi, depth, vertex_leaf);
    }

    void split(index_t id, const std::vector<double>& lo, const std::vector<double>& hi, int depth,
               std::vector<index_t>& vertex_leaf) {
        auto& blocks = tree_.blocks();
        const int n = tree_.complex().ambient_dim();
        const int cn = tree_.children_per_brood();
        const index_t brood = static_cast<index_t>(blocks.size());
        for (int s = 0; s < cn; ++s) {
            Block child;
            child.parent = id;
            blocks.push_back(std::move(child));
        }
        Block& b = tree_.block(id);
        b.brood = brood;
        std::vector<index_t> pending = std::move(b.vertex_list);
        b.vertex_list.clear();

        for (index_t v : pending) {
            const auto point = tree_.complex().vertex(v);
            int slot = 0;
            if (tree_.split_mode() == SplitMode::quadtree) {
                for (int a = 0; a < n; ++a)
                    if (point[a] >= 0.5 * (lo[a] + hi[a])) slot |= (1 << a);
            } else {
                const int a = depth % n;
                if (point[a] >= 0.5 * (lo[a] + hi[a])) slot = 1;
            }
            Block& child = tree_.block(brood + slot);
            child.materialized = true;
            child.vertex_list.push_back(v);
            vertex_leaf[static_cast<std::size_t>(v)] = brood + slot;
        }
        // a child may itself overflow when the distribution is skewed
        for (int s = 0; s < cn; ++s) {
            const index_t child = brood + s;
            if (!tree_.block(child).materialized) continue;
            if (tree_.block(child).vertex_list.size() <= kv_) continue;
            if (depth + 1 >= max_total_depth_) continue;
            std::vector<double> clo = lo, chi = hi;
            child_domain(clo, chi, s, depth, n);
            split(child, clo, chi, depth + 1, vertex_leaf);
        }
    }

    void child_domain(std::vector<double>& lo, std::vector<double>& hi, int slot, int depth,
                      int n) const {
        if (tree_.split_mode() == SplitMode::quadtree) {
            for (int a = 0; a < n; ++a) {
                const double mid = 0.5 * (lo[a] + hi[a]);
                if ((slot >> a) & 1)
                    lo[a] = mid;
                else
                    hi[a] = mid;
            }
        } else {
            const int a = depth % n;
            const double mid = 0.5 * (lo[a] + hi[a]);
            if (slot & 1)
                lo[a] = mid;
            else
                hi[a] = mid;
        }
    }

    StellarTree& tree_;
    count_t kv_;
    int max_total_depth_;
};

} // namespace detail

/// Phase 1 of generation: bucket-PR insertion of the complex's vertices.
/// Every leaf holds at most kv vertices unless the depth cap stops further
/// splits (coincident points). The root domain is the tight bounding box of
/// the vertices; block domains are recomputed from split planes on demand.
inline StellarTree build_hierarchy(IndexedComplex&& complex, count_t kv,
                                   SplitMode mode = SplitMode::quadtree, int max_depth = 64) {
    require(kv >= 1, errc::parameter, "bucketing threshold kv must be >= 1");
    require(complex.vertex_count() >= 1, errc::empty_complex, "cannot index an empty vertex set");
    require(max_depth >= 1, errc::parameter, "max_depth must be >= 1");
    const int n = complex.ambient_dim();
    if (mode == SplitMode::quadtree)
        require(n <= 6, errc::parameter, "quadtree-like splits limited to ambient dimension 6");

    std::vector<double> lower(complex.vertex(0).begin(), complex.vertex(0).end());
    std::vector<double> upper = lower;
    for (index_t v = 1; v < complex.vertex_count(); ++v) {
        const auto p = complex.vertex(v);
        for (int a = 0; a < n; ++a) {
            lower[a] = std::min(lower[a], p[a]);
            upper[a] = std::max(upper[a], p[a]);
        }
    }

    StellarTree tree;
    tree.complex_ = std::move(complex);
    tree.set_build_metadata(kv, mode, max_depth, std::move(lower), std::move(upper));
    detail::TreeBuilder(tree, kv, max_depth).run();
    return tree;
}

/// Phase 3 of generation: each top cell's index is appended (as a literal) to
/// the top-cell list of every leaf indexing at least one of its vertices.
inline void insert_top_cells(StellarTree& tree) {
    const auto& complex = tree.complex();
    for (auto& b : tree.blocks_) {
        if (b.is_leaf() && b.materialized) b.top_lists.assign(complex.buckets().size(), SreList{});
    }
    std::vector<index_t> cell_leaves;
    for (std::uint32_t bi = 0; bi < complex.buckets().size(); ++bi) {
        const auto& bucket = complex.bucket(bi);
        for (index_t t = 0; t < bucket.size(); ++t) {
            cell_leaves.clear();
            for (index_t v : bucket.verts(t)) cell_leaves.push_back(tree.leaf_of_vertex(v));
            std::sort(cell_leaves.begin(), cell_leaves.end());
            cell_leaves.erase(std::unique(cell_leaves.begin(), cell_leaves.end()),
                              cell_leaves.end());
            for (index_t leaf : cell_leaves)
                tree.block(leaf).top_lists[bi].push_literal(t);
        }
    }
}

} // namespace stellar
