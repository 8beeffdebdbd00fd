#include <catch2/catch.hpp>

#include <map>
#include <set>

#include "helpers.hpp"

using namespace stellar;

namespace {

StellarTree pipeline_tree(IndexedComplex c, count_t kv) {
    return run_pipeline(std::move(c), kv, EncodingMode::compressed).tree;
}

/// kv-independent signature of an adjacency structure, expressed through
/// vertex tuples instead of cell ids: for every cell (keyed by its canonical
/// vertex tuple), the per-slot states with adjacent cells as vertex tuples.
std::map<std::vector<index_t>, std::vector<std::string>> adjacency_signature(
    const IndexedComplex& c, const IAStarStructure& s,
    const std::vector<index_t>& vertex_to_input) {
    auto map_v = [&](index_t v) {
        return vertex_to_input.empty() ? v : vertex_to_input[static_cast<std::size_t>(v)];
    };
    auto tuple_of = [&](TopCellRef ref) {
        std::vector<index_t> t;
        for (index_t v : c.cell_verts(ref)) t.push_back(map_v(v));
        return canonical_tuple(t);
    };
    std::map<std::vector<index_t>, std::vector<std::string>> out;
    for (std::uint32_t bi = 0; bi < c.buckets().size(); ++bi) {
        const auto& bucket = c.bucket(bi);
        if (bucket.size() == 0 || s.slots.size() <= bi || s.slots[bi].empty()) continue;
        const index_t fcount =
            static_cast<index_t>(boundary_face_count(bucket.kind(), bucket.kind().dim - 1));
        for (index_t t = 0; t < bucket.size(); ++t) {
            std::vector<std::string> row;
            for (index_t j = 0; j < fcount; ++j) {
                const auto& slot =
                    s.slots[bi][static_cast<std::size_t>(t) * fcount + static_cast<std::size_t>(j)];
                switch (slot.state) {
                    case SlotState::unknown: row.push_back("u"); break;
                    case SlotState::boundary: row.push_back("b"); break;
                    case SlotState::non_manifold: row.push_back("n"); break;
                    case SlotState::adjacent: {
                        std::string tag = "a:";
                        for (index_t v : tuple_of(slot.cell)) tag += std::to_string(v) + ",";
                        row.push_back(tag);
                        break;
                    }
                }
            }
            out[tuple_of({bi, t})] = std::move(row);
        }
    }
    return out;
}

std::map<std::vector<index_t>, std::vector<std::string>> run_and_sign(IndexedComplex c, count_t kv,
                                                                      bool iastar) {
    auto result = run_pipeline(std::move(c), kv, EncodingMode::compressed);
    const auto report = iastar ? gen_iastar(result.tree, GenMode::global)
                               : gen_ia(result.tree, GenMode::global);
    std::vector<index_t> v_inv;
    if (!result.vertex_permutation.empty()) {
        v_inv.resize(result.vertex_permutation.size());
        for (std::size_t i = 0; i < v_inv.size(); ++i)
            v_inv[static_cast<std::size_t>(result.vertex_permutation[i])] =
                static_cast<index_t>(i);
    }
    return adjacency_signature(result.tree.complex(), report.structure, v_inv);
}

} // namespace

TEST_CASE("two tetrahedra pair across the shared triangle") {
    auto tree = pipeline_tree(testutil::two_tets_shared_triangle(), kv_infinite);
    const auto report = gen_ia(tree, GenMode::global);
    const auto& slots = report.structure.slots[0];
    REQUIRE(slots.size() == 8);

    count_t adjacent = 0, boundary = 0;
    for (const auto& s : slots) {
        if (s.state == SlotState::adjacent) ++adjacent;
        if (s.state == SlotState::boundary) ++boundary;
    }
    CHECK(adjacent == 2); // one slot on each side
    CHECK(boundary == 6);

    // tet 0 = (0,1,2,3): the shared triangle (1,2,3) sits opposite vertex
    // position 0, so slot 0 points at tet 1
    CHECK(slots[0].state == SlotState::adjacent);
    CHECK(slots[0].cell == TopCellRef{0, 1});
    CHECK(slots[4 + 3].state == SlotState::adjacent); // tet 1 slot of face (1,2,3)
}

TEST_CASE("single triangle is all boundary with one representative per vertex") {
    IndexedComplex c(2);
    const double p[3][2] = {{0, 0}, {1, 0}, {0, 1}};
    for (const auto& q : p) c.add_vertex(q);
    const index_t t[3] = {0, 1, 2};
    c.add_cell(simplex(2), t);
    auto tree = pipeline_tree(std::move(c), kv_infinite);
    const auto report = gen_ia(tree, GenMode::global);
    CHECK(report.structure.boundary_slots() == 3);
    for (index_t v = 0; v < 3; ++v) {
        REQUIRE(report.structure.vertex_reps.at(2)[static_cast<std::size_t>(v)].size() == 1);
        CHECK(report.structure.vertex_reps.at(2)[static_cast<std::size_t>(v)][0] ==
              TopCellRef{0, 0});
    }
}

TEST_CASE("single tetrahedron: all slots boundary, all reps the tetrahedron") {
    auto tree = pipeline_tree(testutil::single_tetrahedron(), kv_infinite);
    const auto report = gen_ia(tree, GenMode::global);
    CHECK(report.structure.boundary_slots() == 4);
    for (index_t v = 0; v < 4; ++v)
        CHECK(report.structure.vertex_reps.at(3)[static_cast<std::size_t>(v)] ==
              std::vector<TopCellRef>{{0, 0}});
}

TEST_CASE("per-leaf adjacency equals global restricted to leaf-indexed faces") {
    auto complex = gen_tri_grid(8, 8);
    testutil::jitter(complex, 64);
    auto tree = pipeline_tree(std::move(complex), 20);
    REQUIRE(tree.leaves().size() >= 4);

    const auto global = gen_ia(tree, GenMode::global).structure;
    const auto& c = tree.complex();
    const auto& bucket = c.bucket(0);
    const index_t fcount = 3;

    for (index_t leaf : tree.leaves()) {
        const auto local = extract_adjacency_manifold(tree, leaf);
        for (index_t t = 0; t < bucket.size(); ++t) {
            auto faces = boundary_faces(bucket.kind(), bucket.verts(t), 1);
            for (index_t j = 0; j < fcount; ++j) {
                const auto& ls =
                    local.slots[0][static_cast<std::size_t>(t) * 3 + static_cast<std::size_t>(j)];
                if (ls.state == SlotState::unknown) continue;
                // any slot the leaf derived must match the global table
                const auto& gs =
                    global.slots[0][static_cast<std::size_t>(t) * 3 + static_cast<std::size_t>(j)];
                CHECK(ls == gs);
                // and it was derivable: the face has a vertex in this leaf
                bool in_leaf = false;
                for (index_t v : faces[static_cast<std::size_t>(j)])
                    if (tree.leaf_contains_vertex(leaf, v)) in_leaf = true;
                CHECK(in_leaf);
            }
        }
    }
}

TEST_CASE("global IA output is independent of kv") {
    for (bool iastar : {false, true}) {
        const auto baseline = run_and_sign(gen_tri_grid(16, 16), kv_infinite, iastar);
        for (count_t kv : {4ull, 64ull}) {
            const auto signature = run_and_sign(gen_tri_grid(16, 16), kv, iastar);
            CHECK(signature == baseline);
        }
    }
}

TEST_CASE("global adjacency equals the brute-force coface map") {
    std::vector<IndexedComplex> meshes;
    meshes.push_back(gen_tet_grid(3, 2, 2));
    meshes.push_back(gen_hex_grid(2, 3, 2));
    {
        // pure 2-complex mixing triangles and quads across a shared edge
        IndexedComplex c(2);
        const double p[5][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 0.5}};
        for (const auto& q : p) c.add_vertex(q);
        const index_t quad[4] = {0, 1, 2, 3};
        const index_t tri[3] = {1, 4, 2};
        c.add_cell(cube(2), quad);
        c.add_cell(simplex(2), tri);
        meshes.push_back(std::move(c));
    }

    for (auto& mesh : meshes) {
        testutil::jitter(mesh, 909);
        auto tree = pipeline_tree(std::move(mesh), 10);
        const auto& c = tree.complex();
        const int d = c.complex_dim();
        const auto oracle = testutil::oracle_face_cofaces(c, d);
        const auto report = gen_ia(tree, GenMode::global);

        for (std::uint32_t bi = 0; bi < c.buckets().size(); ++bi) {
            const auto& bucket = c.bucket(bi);
            if (bucket.size() == 0) continue;
            const index_t fcount =
                static_cast<index_t>(boundary_face_count(bucket.kind(), d - 1));
            for (index_t t = 0; t < bucket.size(); ++t) {
                auto faces = boundary_faces(bucket.kind(), bucket.verts(t), d - 1);
                for (index_t j = 0; j < fcount; ++j) {
                    const auto& slot = report.structure.slots[bi][static_cast<std::size_t>(t) *
                                                                      fcount +
                                                                  static_cast<std::size_t>(j)];
                    const auto& cofaces =
                        oracle.at(canonical_tuple(faces[static_cast<std::size_t>(j)]));
                    if (cofaces.size() == 1) {
                        CHECK(slot.state == SlotState::boundary);
                    } else {
                        REQUIRE(cofaces.size() == 2);
                        CHECK(slot.state == SlotState::adjacent);
                        const TopCellRef other = cofaces[0].first == TopCellRef{bi, t}
                                                     ? cofaces[1].first
                                                     : cofaces[0].first;
                        CHECK(slot.cell == other);
                    }
                }
            }
        }
    }
}

TEST_CASE("iastar over a pure 1-complex pairs edges across vertices") {
    IndexedComplex c(2);
    const double p[3][2] = {{0, 0}, {1, 0}, {2, 0}};
    for (const auto& q : p) c.add_vertex(q);
    const index_t e1[2] = {0, 1};
    const index_t e2[2] = {1, 2};
    c.add_cell(simplex(1), e1);
    c.add_cell(simplex(1), e2);
    auto tree = pipeline_tree(std::move(c), kv_infinite);
    const auto report = gen_iastar(tree, GenMode::global);

    // edge 0 = (0,1): slot 0 is the vertex opposite position 0, i.e. {1}
    const auto& slots = report.structure.slots[0];
    REQUIRE(slots.size() == 4);
    CHECK(slots[0].state == SlotState::adjacent);
    CHECK(slots[0].cell == TopCellRef{0, 1});
    CHECK(slots[1].state == SlotState::boundary);
    CHECK(report.structure.vertex_top_edges[1].size() == 2);
    CHECK(report.structure.vertex_reps.count(1) == 0); // R(0,1) replaces reps at k=1
}

TEST_CASE("closed tetrahedral mesh has no boundary") {
    auto tree = pipeline_tree(gen_tet_grid(3, 3, 3, /*wrap=*/true), 16);
    const auto report = gen_ia(tree, GenMode::global);
    CHECK(report.structure.boundary_slots() == 0);
    count_t unknown = 0;
    for (const auto& bucket_slots : report.structure.slots)
        for (const auto& s : bucket_slots)
            if (s.state == SlotState::unknown) ++unknown;
    CHECK(unknown == 0);
}

TEST_CASE("generation works identically from explicit-encoding trees") {
    // explicit trees never relabel, and a root-only compressed tree relabels
    // to the identity, so their tables must agree slot for slot
    auto explicit_tree =
        run_pipeline(gen_tri_grid(10, 10), 8, EncodingMode::explicit_lists).tree;
    auto baseline_tree =
        run_pipeline(gen_tri_grid(10, 10), kv_infinite, EncodingMode::compressed).tree;
    const auto a = gen_ia(explicit_tree, GenMode::global);
    const auto b = gen_ia(baseline_tree, GenMode::global);
    CHECK(a.structure.slots == b.structure.slots);
    CHECK(a.structure.vertex_reps.at(2) == b.structure.vertex_reps.at(2));

    const auto ha = gen_halfedge_global(explicit_tree);
    const auto hb = gen_halfedge_global(baseline_tree);
    CHECK(ha.structure.paired_half_edges == hb.structure.paired_half_edges);
    CHECK(ha.structure.half_edges.size() == hb.structure.half_edges.size());
}

TEST_CASE("local and global modes produce the same tables") {
    auto complex = gen_tet_grid(3, 3, 3);
    testutil::jitter(complex, 12);
    auto tree = pipeline_tree(std::move(complex), 32);
    const auto global = gen_ia(tree, GenMode::global);
    const auto local = gen_ia(tree, GenMode::local);
    CHECK(global.structure.slots == local.structure.slots);
    // local mode re-derives shared faces in every leaf touching them
    CHECK(local.aux_peak_entries >= global.aux_peak_entries);
}

TEST_CASE("gen_ia rejects non-pure and non-manifold complexes") {
    auto mixed = pipeline_tree(testutil::mixed_complex(), kv_infinite);
    CHECK_THROWS_AS(gen_ia(mixed, GenMode::global), error);

    auto fan = pipeline_tree(testutil::three_tet_fan(), kv_infinite);
    try {
        gen_ia(fan, GenMode::global);
        FAIL("expected pseudo-manifold violation");
    } catch (const error& e) {
        CHECK(e.code() == errc::pseudo_manifold_violation);
    }
}

TEST_CASE("pinwheel vertex has two 2-clusters") {
    auto tree = pipeline_tree(testutil::pinwheel(), kv_infinite);
    const auto report = gen_iastar(tree, GenMode::global);
    const auto& reps = report.structure.vertex_reps.at(2);
    CHECK(reps[0].size() == 2); // shared vertex
    CHECK(reps[1].size() == 1);
    CHECK(reps[3].size() == 1);
    CHECK(testutil::oracle_cluster_count(tree.complex(), 0, 2) == 2);
}

TEST_CASE("three-tetrahedra fan routes the shared triangle to R(2,3)") {
    auto tree = pipeline_tree(testutil::three_tet_fan(), kv_infinite);
    const auto report = gen_iastar(tree, GenMode::global);

    REQUIRE(report.structure.nm_cofaces.size() == 1);
    const auto& [face, cofaces] = *report.structure.nm_cofaces.begin();
    CHECK(face == std::vector<index_t>{0, 1, 2});
    CHECK(cofaces.size() == 3);

    // all three tets carry the non-manifold mark at the shared slot
    count_t nm_slots = 0;
    for (const auto& s : report.structure.slots[0])
        if (s.state == SlotState::non_manifold) ++nm_slots;
    CHECK(nm_slots == 3);
}

TEST_CASE("mixed complex cluster counts match the union-find oracle") {
    auto tree = pipeline_tree(testutil::mixed_complex(), kv_infinite);
    const auto report = gen_iastar(tree, GenMode::global);
    const auto& c = tree.complex();

    for (int k : {2, 3}) {
        const auto& reps = report.structure.vertex_reps.at(k);
        for (index_t v = 0; v < c.vertex_count(); ++v) {
            CHECK(reps[static_cast<std::size_t>(v)].size() ==
                  testutil::oracle_cluster_count(c, v, k));
        }
    }
    // R(0,1) lists exactly the top edges at each vertex
    const auto edge_oracle = testutil::oracle_vertex_coboundary(c, 1);
    for (index_t v = 0; v < c.vertex_count(); ++v) {
        const auto& got = report.structure.vertex_top_edges[static_cast<std::size_t>(v)];
        std::set<TopCellRef> set_got(got.begin(), got.end());
        auto it = edge_oracle.find(v);
        CHECK(set_got == (it == edge_oracle.end() ? std::set<TopCellRef>{} : it->second));
    }
}

TEST_CASE("iastar on a pseudo-manifold degrades to IA") {
    auto complex = gen_tri_grid(6, 6);
    auto tree = pipeline_tree(std::move(complex), 12);
    const auto ia = gen_ia(tree, GenMode::global);
    const auto star = gen_iastar(tree, GenMode::global);
    CHECK(ia.structure.slots == star.structure.slots);
    CHECK(star.structure.nm_cofaces.empty());
    // one cluster per vertex on a manifold mesh
    for (const auto& reps : star.structure.vertex_reps.at(2)) CHECK(reps.size() == 1);
}

// --- half-edge -------------------------------------------------------------

TEST_CASE("single triangle: three boundary half-edges in one cycle") {
    IndexedComplex c(2);
    const double p[3][2] = {{0, 0}, {1, 0}, {0, 1}};
    for (const auto& q : p) c.add_vertex(q);
    const index_t t[3] = {0, 1, 2};
    c.add_cell(simplex(2), t);
    auto tree = pipeline_tree(std::move(c), kv_infinite);
    const auto report = gen_halfedge_global(tree);
    const auto& s = report.structure;
    REQUIRE(s.half_edges.size() == 3);
    CHECK(s.paired_half_edges == 0);
    for (const auto& he : s.half_edges) CHECK(he.opposite == -1);
    // next-cycle has period 3
    index_t he = s.face_he.begin()->second;
    index_t steps = 0, cur = he;
    do {
        cur = s.half_edges[static_cast<std::size_t>(cur)].next;
        ++steps;
    } while (cur != he);
    CHECK(steps == 3);
    // next and prev are mutually inverse
    for (index_t i = 0; i < 3; ++i) {
        CHECK(s.half_edges[static_cast<std::size_t>(s.half_edges[static_cast<std::size_t>(i)].next)]
                  .prev == i);
    }
}

TEST_CASE("two consistently oriented triangles share one opposite pair") {
    IndexedComplex c(2);
    const double p[4][2] = {{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}};
    for (const auto& q : p) c.add_vertex(q);
    const index_t t1[3] = {0, 1, 2};
    const index_t t2[3] = {1, 0, 3}; // opposite traversal of edge (0,1)
    c.add_cell(simplex(2), t1);
    c.add_cell(simplex(2), t2);
    auto tree = pipeline_tree(std::move(c), kv_infinite);
    const auto report = gen_halfedge_global(tree);
    CHECK(report.structure.half_edges.size() == 6);
    CHECK(report.structure.paired_half_edges == 2);
    // opposite half-edges swap source and target
    for (index_t i = 0; i < 6; ++i) {
        const auto& rec = report.structure.half_edges[static_cast<std::size_t>(i)];
        if (rec.opposite < 0) continue;
        const auto& opp = report.structure.half_edges[static_cast<std::size_t>(rec.opposite)];
        CHECK(opp.opposite == i);
        const auto& next = report.structure.half_edges[static_cast<std::size_t>(rec.next)];
        CHECK(opp.source == next.source); // target of rec equals source of opp
    }
}

TEST_CASE("half-edge errors: non-manifold edge and inconsistent orientation") {
    SECTION("three triangles on one edge") {
        IndexedComplex c(3);
        const double p[5][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}};
        for (const auto& q : p) c.add_vertex(q);
        const index_t t1[3] = {0, 1, 2};
        const index_t t2[3] = {1, 0, 3};
        const index_t t3[3] = {0, 1, 4};
        c.add_cell(simplex(2), t1);
        c.add_cell(simplex(2), t2);
        c.add_cell(simplex(2), t3);
        auto tree = pipeline_tree(std::move(c), kv_infinite);
        try {
            gen_halfedge_global(tree);
            FAIL("expected non-manifold edge");
        } catch (const error& e) {
            CHECK(e.code() == errc::non_manifold_edge);
        }
    }

    SECTION("same-direction traversal") {
        IndexedComplex c(2);
        const double p[4][2] = {{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}};
        for (const auto& q : p) c.add_vertex(q);
        const index_t t1[3] = {0, 1, 2};
        const index_t t2[3] = {0, 1, 3}; // same direction on edge (0,1)
        c.add_cell(simplex(2), t1);
        c.add_cell(simplex(2), t2);
        auto tree = pipeline_tree(std::move(c), kv_infinite);
        try {
            gen_halfedge_global(tree);
            FAIL("expected inconsistent orientation");
        } catch (const error& e) {
            CHECK(e.code() == errc::inconsistent_orientation);
        }
    }

    SECTION("non-2-complex rejected") {
        auto tree = pipeline_tree(testutil::single_tetrahedron(), kv_infinite);
        CHECK_THROWS_AS(gen_halfedge_global(tree), error);
    }
}

TEST_CASE("torus quad grid pairs every half-edge") {
    auto tree = pipeline_tree(gen_torus_quad_grid(8, 8), 16);
    const auto report = gen_halfedge_global(tree);
    const auto& s = report.structure;
    const count_t V = 64, F = 64, E = static_cast<count_t>(s.half_edges.size()) / 2;
    CHECK(s.half_edges.size() == 256);
    CHECK(s.paired_half_edges == s.half_edges.size());
    CHECK(V + F == E); // V - E + F = 0
}

TEST_CASE("open grid boundary half-edges count the perimeter") {
    const int r = 5, q = 7;
    auto tree = pipeline_tree(gen_quad_grid(r, q), 16);
    const auto report = gen_halfedge_global(tree);
    CHECK(report.structure.boundary_half_edges() == static_cast<count_t>(2 * (r + q)));
    // next-cycle period equals face arity everywhere
    const auto& s = report.structure;
    for (const auto& [face, first] : s.face_he) {
        index_t steps = 0, cur = first;
        do {
            cur = s.half_edges[static_cast<std::size_t>(cur)].next;
            ++steps;
        } while (cur != first);
        CHECK(steps == 4);
    }
}

TEST_CASE("half-edge pairing is independent of kv") {
    auto face_pairs = [](count_t kv) {
        auto result = run_pipeline(gen_torus_quad_grid(6, 6), kv, EncodingMode::compressed);
        const auto report = gen_halfedge_global(result.tree);
        // express pairs through vertex coordinates of the two faces
        std::multiset<std::multiset<std::multiset<std::vector<double>>>> pairs;
        const auto& c = result.tree.complex();
        auto face_sig = [&](TopCellRef f) {
            std::multiset<std::vector<double>> sig;
            for (index_t v : c.cell_verts(f)) {
                const auto p = c.vertex(v);
                sig.insert(std::vector<double>(p.begin(), p.end()));
            }
            return sig;
        };
        for (const auto& he : report.structure.half_edges) {
            if (he.opposite < 0) continue;
            const auto& opp = report.structure.half_edges[static_cast<std::size_t>(he.opposite)];
            pairs.insert({face_sig(he.face), face_sig(opp.face)});
        }
        return pairs;
    };
    const auto base = face_pairs(kv_infinite);
    CHECK(face_pairs(4) == base);
    CHECK(face_pairs(64) == base);
}

TEST_CASE("local half-edge structures stay leaf-sized") {
    auto complex = gen_quad_grid(10, 10);
    testutil::jitter(complex, 2);
    auto tree = pipeline_tree(std::move(complex), 12);
    count_t total = 0, leaves = 0;
    gen_halfedge_local(tree, [&](index_t, const HalfEdgeStructure& s) {
        total += s.half_edges.size();
        ++leaves;
        for (const auto& he : s.half_edges) {
            if (he.opposite < 0) continue;
            CHECK(s.half_edges[static_cast<std::size_t>(he.opposite)].opposite >= 0);
        }
    });
    CHECK(leaves == tree.leaves().size());
    // spanning cells are expanded in several leaves
    CHECK(total >= 4 * 100);
}

TEST_CASE("local-mode auxiliary structures are bounded by the largest leaf") {
    auto tree = pipeline_tree(gen_tet_grid(8, 8, 4), 64);
    const auto report = gen_ia(tree, GenMode::local);

    count_t max_leaf_cells = 0;
    for (index_t leaf : tree.leaves()) {
        count_t cells = 0;
        for (const auto& list : tree.block(leaf).top_lists) cells += list.size();
        max_leaf_cells = std::max(max_leaf_cells, cells);
    }
    CHECK(report.aux_peak_entries <= max_leaf_cells * 4);
    CHECK(report.aux_peak_entries < tree.complex().top_cell_count());
}
