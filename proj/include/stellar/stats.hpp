#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "stellar/decomposition.hpp"
#include "stellar/error.hpp"

namespace stellar {

/// Quantitative characterization of a built tree: spanning and reference
/// numbers, block census and storage costs in abstract reference counts.
struct TreeStats {
    // per bucket, per cell: number of leaves indexing the cell
    std::vector<std::vector<count_t>> chi_per_cell;
    double chi = 0; // average spanning number
    double mu = 0;  // average reference number

    count_t sum_chi = 0;     // sum over cells of chi_sigma
    count_t sum_phi_top = 0; // sum over leaves of |PhiTop(B)|, must equal sum_chi

    count_t blocks_total = 0;    // |h|  (materialized blocks)
    count_t blocks_internal = 0; // |hI|
    count_t blocks_leaf = 0;     // |hL|

    count_t vertex_count = 0;
    count_t top_cell_count = 0;

    count_t cost_hierarchy_refs = 0;    // 7|h|
    count_t cost_vertex_lists_refs = 0; // |V| explicit, 0 once folded into ranges
    count_t cost_cell_lists_refs = 0;   // stored entries across leaf lists
    count_t cost_indexed_refs = 0;      // indexed complex base cost

    EncodingMode encoding = EncodingMode::explicit_lists;

    count_t total_tree_refs() const {
        return cost_hierarchy_refs + cost_vertex_lists_refs + cost_cell_lists_refs;
    }

    count_t bytes(count_t refs, unsigned ref_width = 4) const { return refs * ref_width; }
};

/// Spanning numbers per cell plus the Def.-style average, computed along two
/// routes that must agree: per-cell counters and leaf list sizes.
inline TreeStats compute_stats(const StellarTree& tree) {
    TreeStats s;
    const auto& complex = tree.complex();
    s.encoding = tree.encoding_mode();
    s.vertex_count = static_cast<count_t>(complex.vertex_count());
    s.top_cell_count = complex.top_cell_count();
    s.cost_indexed_refs = complex.storage_cost();

    s.chi_per_cell.resize(complex.buckets().size());
    for (std::size_t b = 0; b < complex.buckets().size(); ++b)
        s.chi_per_cell[b].assign(static_cast<std::size_t>(complex.buckets()[b].size()), 0);

    count_t stored_entries = 0;
    count_t explicit_vertex_refs = 0;

    for (index_t id = 0; id < static_cast<index_t>(tree.blocks().size()); ++id) {
        const Block& b = tree.block(id);
        if (!b.materialized) continue;
        ++s.blocks_total;
        if (b.is_leaf()) {
            ++s.blocks_leaf;
            explicit_vertex_refs += static_cast<count_t>(b.vertex_list.size());
            for (std::size_t bi = 0; bi < b.top_lists.size(); ++bi) {
                stored_entries += static_cast<count_t>(b.top_lists[bi].entry_count());
                s.sum_phi_top += b.top_lists[bi].size();
                b.top_lists[bi].for_each(
                    [&](index_t t) { ++s.chi_per_cell[bi][static_cast<std::size_t>(t)]; });
            }
        } else {
            ++s.blocks_internal;
        }
    }

    for (const auto& per_bucket : s.chi_per_cell)
        for (count_t c : per_bucket) s.sum_chi += c;
    require(s.sum_chi == s.sum_phi_top, errc::corruption,
            "spanning-number identity violated: sum chi != sum |PhiTop|");

    if (s.top_cell_count > 0) {
        s.chi = static_cast<double>(s.sum_chi) / static_cast<double>(s.top_cell_count);
        s.mu = static_cast<double>(stored_entries) / static_cast<double>(s.top_cell_count);
    }

    s.cost_hierarchy_refs = 7 * s.blocks_total;
    s.cost_vertex_lists_refs =
        tree.encoding_mode() == EncodingMode::explicit_lists ? explicit_vertex_refs : 0;
    s.cost_cell_lists_refs = stored_entries;
    return s;
}

/// Average spanning number alone.
inline double spanning_number(const StellarTree& tree) { return compute_stats(tree).chi; }

/// Average reference number alone (stored entries per top cell).
inline double reference_number(const StellarTree& tree) { return compute_stats(tree).mu; }

inline std::string stats_csv_header() {
    return "vertices,top_cells,kv,blocks,leaf_blocks,chi,mu,"
           "hierarchy_refs,vertex_list_refs,cell_list_refs,tree_refs,indexed_refs,encoding";
}

inline std::string stats_csv_row(const TreeStats& s, count_t kv) {
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    std::string kv_str = kv == kv_infinite ? "inf" : std::to_string(kv);
    return std::to_string(s.vertex_count) + "," + std::to_string(s.top_cell_count) + "," + kv_str +
           "," + std::to_string(s.blocks_total) + "," + std::to_string(s.blocks_leaf) + "," +
           num(s.chi) + "," + num(s.mu) + "," + std::to_string(s.cost_hierarchy_refs) + "," +
           std::to_string(s.cost_vertex_lists_refs) + "," + std::to_string(s.cost_cell_lists_refs) +
           "," + std::to_string(s.total_tree_refs()) + "," + std::to_string(s.cost_indexed_refs) +
           "," + encoding_mode_name(s.encoding);
}

} // namespace stellar
