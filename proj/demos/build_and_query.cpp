// Walkthrough of the library API: synthesize a mesh, run the generation
// pipeline, inspect storage stats, stream a batched query and generate an
// adjacency structure.

#include <cstdio>
#include <stellar/stellar.hpp>

int main() {
    using namespace stellar;

    // a 32x32 triangulated grid with two top quads glued on would also work;
    // any CP complex goes through the same pipeline
    IndexedComplex mesh = gen_tri_grid(32, 32);

    // four phases: vertex insertion, vertex reindexing, cell insertion,
    // cell reindexing + SRE compaction
    PipelineResult result = run_pipeline(std::move(mesh), /*kv=*/64, EncodingMode::compressed);
    StellarTree& tree = result.tree;

    const TreeStats stats = compute_stats(tree);
    std::printf("vertices=%llu top_cells=%llu leaves=%llu chi=%.3f mu=%.3f tree_refs=%llu\n",
                (unsigned long long)stats.vertex_count, (unsigned long long)stats.top_cell_count,
                (unsigned long long)stats.blocks_leaf, stats.chi, stats.mu,
                (unsigned long long)stats.total_tree_refs());

    // batched traversal: count distinct edges per leaf through the LRU cache
    LeafCache cache(8);
    count_t edge_records = 0;
    visit_leaves(tree, cache, [&](ExpandedLeaf& leaf) {
        edge_records += static_cast<count_t>(leaf.p_cells(1).size());
    });
    std::printf("edge records over all leaves=%llu (expansions=%llu)\n",
                (unsigned long long)edge_records, (unsigned long long)cache.expansions());

    // adjacency structure with boundary marks
    const IAGenReport ia = gen_ia(tree, GenMode::global);
    std::printf("boundary slots=%llu aux_peak=%llu\n",
                (unsigned long long)ia.structure.boundary_slots(),
                (unsigned long long)ia.aux_peak_entries);
    return 0;
}
