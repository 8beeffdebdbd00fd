#include <catch2/catch.hpp>

#include <numeric>
#include <random>
#include <set>

#include "helpers.hpp"

using namespace stellar;

namespace {

IndexedComplex four_points(double spread = 4.0) {
    IndexedComplex c(2);
    const double p[4][2] = {{0, 0}, {spread, 0}, {0, spread}, {spread, spread}};
    for (const auto& q : p) c.add_vertex(q);
    return c;
}

} // namespace

TEST_CASE("no overflow keeps the root as single leaf") {
    auto tree = build_hierarchy(four_points(), 4);
    CHECK(tree.leaves().size() == 1);
    CHECK(tree.block(tree.root()).is_leaf());
}

TEST_CASE("kv=1 refines until singleton leaves, brute box check agrees") {
    auto tree = build_hierarchy(four_points(), 1);
    const auto leaves = tree.leaves();
    CHECK(leaves.size() == 4);
    for (index_t leaf : leaves) {
        const auto verts = testutil::leaf_vertex_set(tree, leaf);
        CHECK(verts.size() <= 1);
        for (index_t v : verts)
            CHECK(testutil::oracle_point_in_leaf(tree, leaf, tree.complex().vertex(v)));
    }
}

TEST_CASE("kv=inf indexes everything in the root") {
    auto tree = build_hierarchy(testutil::random_grid(3), kv_infinite);
    CHECK(tree.leaves().size() == 1);
    insert_top_cells(tree);
    CHECK(tree.block(tree.root()).top_lists.size() == tree.complex().buckets().size());
}

TEST_CASE("every vertex lands in the leaf locate_leaf reports") {
    auto tree = build_hierarchy(testutil::random_grid(11), 7);
    const auto& c = tree.complex();
    for (index_t v = 0; v < c.vertex_count(); ++v) {
        const index_t leaf = tree.locate_leaf(c.vertex(v));
        CHECK(tree.leaf_contains_vertex(leaf, v));
        CHECK(testutil::oracle_point_in_leaf(tree, leaf, c.vertex(v)));
    }
}

TEST_CASE("locate_leaf boundary rules") {
    auto tree = build_hierarchy(four_points(), 1);
    const int n = tree.complex().ambient_dim();

    // root's lower corner belongs to the leaf with closed lower faces
    std::vector<double> corner(tree.root_lower().begin(), tree.root_lower().end());
    const index_t lo_leaf = tree.locate_leaf(corner);
    CHECK(testutil::oracle_point_in_leaf(tree, lo_leaf, corner));

    // a point exactly on an interior split plane goes to the upper side
    std::vector<double> mid(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a)
        mid[static_cast<std::size_t>(a)] = 0.5 * (tree.root_lower()[a] + tree.root_upper()[a]);
    const index_t mid_leaf = tree.locate_leaf(mid);
    const BlockDomain d = tree.domain(mid_leaf);
    for (int a = 0; a < n; ++a) CHECK(d.lower[a] == mid[static_cast<std::size_t>(a)]);

    // the root's upper corner is covered (root upper faces closed)
    std::vector<double> upper(tree.root_upper().begin(), tree.root_upper().end());
    CHECK_NOTHROW(tree.locate_leaf(upper));

    upper[0] += 1.0;
    CHECK_THROWS_AS(tree.locate_leaf(upper), error);
}

TEST_CASE("insert_top_cells equals the brute-force star map") {
    auto c = gen_tri_grid(6, 5);
    testutil::jitter(c, 99);
    const auto oracle_complex = c;
    auto tree = build_hierarchy(std::move(c), 2);
    insert_top_cells(tree);

    for (index_t leaf : tree.leaves()) {
        const auto verts = testutil::leaf_vertex_set(tree, leaf);
        const auto expected = testutil::oracle_phi_top(oracle_complex, verts);
        std::set<TopCellRef> actual;
        const Block& b = tree.block(leaf);
        for (std::uint32_t bi = 0; bi < b.top_lists.size(); ++bi)
            b.top_lists[bi].for_each([&](index_t t) { actual.insert({bi, t}); });
        CHECK(actual == expected);
    }
}

TEST_CASE("vertex partition and spanning bounds hold") {
    for (std::uint64_t seed : {5ull, 6ull, 7ull}) {
        auto tree = build_hierarchy(testutil::random_grid(seed), 16);
        insert_top_cells(tree);
        const auto& c = tree.complex();

        count_t covered = 0;
        for (index_t leaf : tree.leaves()) covered += tree.block(leaf).vertex_count();
        CHECK(covered == static_cast<count_t>(c.vertex_count()));

        const auto stats = compute_stats(tree);
        CHECK(stats.sum_chi == stats.sum_phi_top);
        for (std::uint32_t bi = 0; bi < c.buckets().size(); ++bi) {
            const auto& bucket = c.bucket(bi);
            for (index_t t = 0; t < bucket.size(); ++t) {
                const count_t chi = stats.chi_per_cell[bi][static_cast<std::size_t>(t)];
                CHECK(chi >= 1);
                CHECK(chi <= static_cast<count_t>(bucket.arity()));
            }
        }
    }
}

TEST_CASE("tree shape is independent of vertex insertion order") {
    auto base = testutil::random_grid(21);
    // permuted copy of the same point set
    std::vector<index_t> order(static_cast<std::size_t>(base.vertex_count()));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(55);
    std::shuffle(order.begin(), order.end(), rng);
    IndexedComplex permuted(base.ambient_dim());
    for (index_t v : order) permuted.add_vertex(base.vertex(v));

    auto tree_a = build_hierarchy(std::move(base), 5);
    auto tree_b = build_hierarchy(std::move(permuted), 5);

    auto shape_signature = [](const StellarTree& t) {
        std::multiset<std::pair<int, std::multiset<std::vector<double>>>> sig;
        for (index_t leaf : t.leaves()) {
            std::multiset<std::vector<double>> coords;
            for (index_t v : testutil::leaf_vertex_set(t, leaf)) {
                const auto p = t.complex().vertex(v);
                coords.insert(std::vector<double>(p.begin(), p.end()));
            }
            sig.insert({t.depth_of(leaf), std::move(coords)});
        }
        return sig;
    };
    CHECK(shape_signature(tree_a) == shape_signature(tree_b));
}

TEST_CASE("chi decreases as kv grows on grid meshes") {
    auto complex = gen_tri_grid(24, 24);
    double prev_chi = 1e9;
    for (count_t kv : {4ull, 16ull, 100ull}) {
        auto copy = complex;
        auto tree = build_hierarchy(std::move(copy), kv);
        insert_top_cells(tree);
        const double chi = compute_stats(tree).chi;
        CHECK(chi <= prev_chi);
        prev_chi = chi;
    }
}

TEST_CASE("coincident points stop at the depth cap instead of recursing") {
    IndexedComplex c(2);
    const double p[2] = {0.5, 0.5};
    c.add_vertex(p);
    c.add_vertex(p);
    c.add_vertex(p);
    const double q[2] = {2.0, 2.0};
    c.add_vertex(q);
    auto tree = build_hierarchy(std::move(c), 1, SplitMode::quadtree, 8);
    count_t biggest = 0;
    for (index_t leaf : tree.leaves())
        biggest = std::max(biggest, tree.block(leaf).vertex_count());
    CHECK(biggest == 3); // the coincident triple stays together past the cap
}

TEST_CASE("kd split mode covers high ambient dimensions") {
    IndexedComplex c(8);
    std::mt19937_64 rng(13);
    std::vector<double> p(8);
    for (int v = 0; v < 40; ++v) {
        for (auto& x : p) x = static_cast<double>(rng() % 1000) / 10.0;
        c.add_vertex(p);
    }
    CHECK(auto_split_mode(8) == SplitMode::kd);
    auto high_copy = c;
    CHECK_THROWS_AS(build_hierarchy(std::move(high_copy), 4, SplitMode::quadtree), error);

    auto tree = build_hierarchy(std::move(c), 4, SplitMode::kd);
    for (index_t leaf : tree.leaves()) {
        CHECK(tree.block(leaf).vertex_count() <= 4);
        for (index_t v : testutil::leaf_vertex_set(tree, leaf))
            CHECK(testutil::oracle_point_in_leaf(tree, leaf, tree.complex().vertex(v)));
    }

    CHECK_THROWS_AS(build_hierarchy(IndexedComplex(2), 4), error);
    auto pts = four_points();
    CHECK_THROWS_AS(build_hierarchy(std::move(pts), 0), error);
}
