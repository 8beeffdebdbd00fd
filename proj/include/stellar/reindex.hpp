#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "stellar/decomposition.hpp"
#include "stellar/error.hpp"

namespace stellar {

/// Applies a permutation in place: element at old position i moves to
/// position perm[i]. Rows of `stride` values move together. The permutation
/// array is consumed as scratch (entries become -1), so the whole update
/// needs no storage beyond the permutation itself. Non-bijective input is
/// detected through the sentinel bookkeeping.
template <class T>
inline void permute_strided(std::vector<T>& data, std::size_t stride, std::vector<index_t>& perm) {
    const std::size_t n = perm.size();
    require(stride >= 1 && data.size() == n * stride, errc::parameter,
            "permute: array and permutation sizes disagree");
    auto swap_rows = [&](std::size_t a, std::size_t b) {
        for (std::size_t k = 0; k < stride; ++k) std::swap(data[a * stride + k], data[b * stride + k]);
    };
    constexpr index_t applied = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (perm[i] == applied) continue;
        if (perm[i] == static_cast<index_t>(i)) {
            perm[i] = applied;
            continue;
        }
        while (perm[i] != applied && perm[i] != static_cast<index_t>(i)) {
            const index_t dest = perm[i];
            require(dest >= 0 && static_cast<std::size_t>(dest) < n, errc::corruption,
                    "permute: destination out of range");
            require(perm[static_cast<std::size_t>(dest)] != applied, errc::corruption,
                    "permute: two elements map to one destination");
            swap_rows(i, static_cast<std::size_t>(dest));
            perm[i] = perm[static_cast<std::size_t>(dest)];
            perm[static_cast<std::size_t>(dest)] = applied;
        }
        perm[i] = applied;
    }
}

template <class T>
inline void permute_array(std::vector<T>& data, std::vector<index_t>& perm) {
    permute_strided(data, 1, perm);
}

/// Phase 2 of generation: a depth-first traversal assigns every leaf a
/// contiguous vertex index range [v_start, v_end), internal blocks cover the
/// union of their descendants, all R(k,0) tuples are rewritten through the
/// permutation and the coordinate array is permuted in place. Leaf vertex
/// lists fold into the range and are dropped.
///
/// Returns the old-index -> new-index vertex permutation.
inline std::vector<index_t> compress_and_reindex_vertices(StellarTree& tree) {
    require(!tree.vertices_reindexed(), errc::precondition, "vertices already reindexed");
    auto& complex = tree.complex();
    const index_t nv = complex.vertex_count();
    std::vector<index_t> v_perm(static_cast<std::size_t>(nv), -1);

    index_t current = 0;
    // recursive range assignment (Algorithm: compress_tree_verts)
    auto assign = [&](auto&& self, index_t id) -> void {
        Block& b = tree.block(id);
        if (!b.materialized) return;
        b.v_start = current;
        if (b.is_leaf()) {
            for (index_t v : b.vertex_list) {
                v_perm[static_cast<std::size_t>(v)] = current;
                ++current;
            }
            b.vertex_list.clear();
            b.vertex_list.shrink_to_fit();
        } else {
            const int cn = tree.children_per_brood();
            for (int s = 0; s < cn; ++s) self(self, b.brood + s);
        }
        b.v_end = current;
    };
    assign(assign, tree.root());
    require(current == nv, errc::corruption, "vertex ranges do not cover the vertex array");

    for (auto& bucket : complex.buckets()) {
        for (index_t& v : bucket.raw_verts()) v = v_perm[static_cast<std::size_t>(v)];
    }

    std::vector<index_t> result = v_perm;
    permute_strided(complex.raw_coords(), static_cast<std::size_t>(complex.ambient_dim()), v_perm);
    tree.mark_vertices_reindexed();
    return result;
}

namespace detail {

struct TupleHash {
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

/// Associative scaffold for top-cell reindexing: leaf tuples (sorted tuples
/// of leaf identifiers, a leaf being identified by its v_start) map to dense
/// keys in first-encounter order, with one counter per key.
struct LeafTupleIndex {
    std::unordered_map<std::vector<index_t>, index_t, detail::TupleHash> tuple_to_key;
    std::vector<count_t> group_counter;

    index_t key_for(std::vector<index_t>&& tuple) {
        auto [it, inserted] = tuple_to_key.try_emplace(std::move(tuple),
                                                       static_cast<index_t>(tuple_to_key.size()));
        if (inserted) group_counter.push_back(0);
        return it->second;
    }
};

/// Step 1 of cell reindexing: every top cell of one bucket is processed by
/// exactly one leaf (the leaf indexing its minimum vertex index). Its tuple
/// of indexing leaves is interned, the tuple's cell count incremented, and
/// t_position[cell] is set to the tuple key.
inline LeafTupleIndex extract_leaf_tuples(const StellarTree& tree, std::uint32_t bucket_id,
                                          std::vector<index_t>& t_position) {
    require(tree.vertices_reindexed(), errc::precondition,
            "cell reindexing requires reindexed vertices");
    const auto& bucket = tree.complex().bucket(bucket_id);
    LeafTupleIndex index;
    t_position.assign(static_cast<std::size_t>(bucket.size()), -1);

    std::vector<index_t> tuple;
    for (index_t leaf : tree.leaf_order()) {
        const Block& b = tree.block(leaf);
        b.top_lists[bucket_id].for_each([&](index_t t) {
            const auto verts = bucket.verts(t);
            index_t vmin = verts[0];
            for (index_t v : verts) vmin = std::min(vmin, v);
            if (!tree.leaf_contains_vertex(leaf, vmin)) return;
            tuple.clear();
            for (index_t v : verts) tuple.push_back(tree.block(tree.leaf_of_vertex(v)).v_start);
            std::sort(tuple.begin(), tuple.end());
            tuple.erase(std::unique(tuple.begin(), tuple.end()), tuple.end());
            const index_t key = index.key_for(std::vector<index_t>(tuple));
            ++index.group_counter[static_cast<std::size_t>(key)];
            t_position[static_cast<std::size_t>(t)] = key;
        });
    }
    return index;
}

/// Step 2: the prefix sum of group counts (in key order) gives each tuple
/// group its starting index; cells then receive incrementing indices within
/// their group in original scan order. t_position becomes the final cell
/// permutation.
inline void extract_cell_indices(LeafTupleIndex& index, std::vector<index_t>& t_position) {
    count_t next = 0;
    for (auto& entry : index.group_counter) {
        const count_t count = entry;
        entry = next;
        next += count;
    }
    for (auto& pos : t_position) {
        require(pos >= 0, errc::corruption, "cell missed by tuple extraction");
        auto& start = index.group_counter[static_cast<std::size_t>(pos)];
        pos = static_cast<index_t>(start);
        ++start;
    }
}

/// Step 3: leaf top-cell lists are rewritten to the new indices, sorted and
/// SRE-compacted. Runs shorter than three entries stay literal.
inline void compress_tree_cells(StellarTree& tree, std::uint32_t bucket_id,
                                const std::vector<index_t>& t_position) {
    for (index_t leaf : tree.leaf_order()) {
        Block& b = tree.block(leaf);
        std::vector<index_t> aux = b.top_lists[bucket_id].decode();
        for (index_t& t : aux) t = t_position[static_cast<std::size_t>(t)];
        std::sort(aux.begin(), aux.end());
        b.top_lists[bucket_id] = SreList::compress(aux);
    }
}

struct PhaseTimings {
    double insert_vertices_s = 0;
    double reindex_vertices_s = 0;
    double insert_cells_s = 0;
    double reindex_cells_s = 0;
    double total_s = 0;
};

struct PipelineOptions {
    SplitMode split_mode = SplitMode::quadtree;
    bool auto_split = true; // quadtree-like for n <= 6, kD above
    int max_depth = 64;
};

struct PipelineResult {
    StellarTree tree;
    PhaseTimings timings;
    std::vector<index_t> vertex_permutation;              // empty in explicit mode
    std::vector<std::vector<index_t>> cell_permutations;  // per bucket; empty unless compressed
};

/// Full generation pipeline. The compressed encoding runs all four phases;
/// vertex_compressed skips cell reindexing and compaction; explicit skips
/// both reindexing passes and keeps all lists literal.
inline PipelineResult run_pipeline(IndexedComplex complex, count_t kv, EncodingMode encoding,
                                   PipelineOptions options = {}) {
    using clock = std::chrono::steady_clock;
    const auto since = [](clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    PipelineResult result;
    const SplitMode split = options.auto_split ? auto_split_mode(complex.ambient_dim())
                                               : options.split_mode;

    const auto t_start = clock::now();
    auto t0 = clock::now();
    result.tree = build_hierarchy(std::move(complex), kv, split, options.max_depth);
    result.timings.insert_vertices_s = since(t0);

    if (encoding != EncodingMode::explicit_lists) {
        t0 = clock::now();
        result.vertex_permutation = compress_and_reindex_vertices(result.tree);
        result.timings.reindex_vertices_s = since(t0);
    }

    t0 = clock::now();
    insert_top_cells(result.tree);
    result.timings.insert_cells_s = since(t0);

    if (encoding == EncodingMode::compressed) {
        t0 = clock::now();
        auto& buckets = result.tree.complex().buckets();
        result.cell_permutations.resize(buckets.size());
        for (std::uint32_t bi = 0; bi < buckets.size(); ++bi) {
            std::vector<index_t> t_position;
            LeafTupleIndex tuples = extract_leaf_tuples(result.tree, bi, t_position);
            extract_cell_indices(tuples, t_position);
            compress_tree_cells(result.tree, bi, t_position);
            result.cell_permutations[bi] = t_position;
            permute_strided(buckets[bi].raw_verts(),
                            static_cast<std::size_t>(buckets[bi].arity()), t_position);
        }
        result.timings.reindex_cells_s = since(t0);
    }

    result.tree.set_encoding_mode(encoding);
    result.timings.total_s = since(t_start);
    return result;
}

} // namespace stellar
