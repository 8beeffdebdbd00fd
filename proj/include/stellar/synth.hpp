#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stellar/cp_complex.hpp"
#include "stellar/error.hpp"

namespace stellar {

// ---------------------------------------------------------------------------
// grid generators
// ---------------------------------------------------------------------------

/// r x c grid of squares, each split into two triangles along the
/// (i,j)-(i+1,j+1) diagonal. Vertices lie at (x=j, y=i); both triangles are
/// counter-clockwise.
inline IndexedComplex gen_tri_grid(int rows, int cols) {
    require(rows >= 1 && cols >= 1, errc::parameter, "grid dimensions must be >= 1");
    IndexedComplex c(2);
    for (int i = 0; i <= rows; ++i)
        for (int j = 0; j <= cols; ++j) {
            const double p[2] = {static_cast<double>(j), static_cast<double>(i)};
            c.add_vertex(p);
        }
    auto vid = [cols](int i, int j) { return static_cast<index_t>(i * (cols + 1) + j); };
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const index_t p00 = vid(i, j), p01 = vid(i, j + 1);
            const index_t p10 = vid(i + 1, j), p11 = vid(i + 1, j + 1);
            const index_t t1[3] = {p00, p01, p11};
            const index_t t2[3] = {p00, p11, p10};
            c.add_cell(simplex(2), t1);
            c.add_cell(simplex(2), t2);
        }
    return c;
}

/// r x c grid of quads in cyclic counter-clockwise order.
inline IndexedComplex gen_quad_grid(int rows, int cols) {
    require(rows >= 1 && cols >= 1, errc::parameter, "grid dimensions must be >= 1");
    IndexedComplex c(2);
    for (int i = 0; i <= rows; ++i)
        for (int j = 0; j <= cols; ++j) {
            const double p[2] = {static_cast<double>(j), static_cast<double>(i)};
            c.add_vertex(p);
        }
    auto vid = [cols](int i, int j) { return static_cast<index_t>(i * (cols + 1) + j); };
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const index_t q[4] = {vid(i, j), vid(i, j + 1), vid(i + 1, j + 1), vid(i + 1, j)};
            c.add_cell(cube(2), q);
        }
    return c;
}

/// Quad grid wrapped on both axes: V = r*c, E = 2*r*c, F = r*c, so
/// V - E + F = 0.
inline IndexedComplex gen_torus_quad_grid(int rows, int cols) {
    require(rows >= 2 && cols >= 2, errc::parameter, "torus grid needs dimensions >= 2");
    IndexedComplex c(2);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double p[2] = {static_cast<double>(j), static_cast<double>(i)};
            c.add_vertex(p);
        }
    auto vid = [cols](int i, int j) { return static_cast<index_t>(i * cols + j); };
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const int i1 = (i + 1) % rows, j1 = (j + 1) % cols;
            const index_t q[4] = {vid(i, j), vid(i, j1), vid(i1, j1), vid(i1, j)};
            c.add_cell(cube(2), q);
        }
    return c;
}

namespace detail {

// Kuhn subdivision: the six tetrahedra of a unit cube, as chains of axis
// steps from the lowest corner. Translation-invariant, so neighboring cubes
// triangulate conformingly.
inline const std::array<std::array<int, 3>, 6>& kuhn_axis_orders() {
    static const std::array<std::array<int, 3>, 6> orders = {{
        {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
    }};
    return orders;
}

} // namespace detail

/// r x c x s grid of cubes, each split into six tetrahedra around the main
/// diagonal (Kuhn subdivision).
inline IndexedComplex gen_tet_grid(int rows, int cols, int slices, bool wrap = false) {
    require(rows >= 1 && cols >= 1 && slices >= 1, errc::parameter,
            "grid dimensions must be >= 1");
    // below 3 per axis the wrap identifies antipodal cube diagonals
    if (wrap)
        require(rows >= 3 && cols >= 3 && slices >= 3, errc::parameter,
                "wrapped grid needs dimensions >= 3");
    IndexedComplex c(3);
    const int ni = wrap ? rows : rows + 1;
    const int nj = wrap ? cols : cols + 1;
    const int nk = wrap ? slices : slices + 1;
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < nj; ++j)
            for (int k = 0; k < nk; ++k) {
                const double p[3] = {static_cast<double>(j), static_cast<double>(i),
                                     static_cast<double>(k)};
                c.add_vertex(p);
            }
    auto vid = [&](int i, int j, int k) {
        if (wrap) {
            i %= rows;
            j %= cols;
            k %= slices;
        }
        return static_cast<index_t>((i * nj + j) * nk + k);
    };
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            for (int k = 0; k < slices; ++k) {
                for (const auto& order : detail::kuhn_axis_orders()) {
                    int d[3] = {0, 0, 0};
                    index_t tet[4];
                    tet[0] = vid(i, j, k);
                    for (int step = 0; step < 3; ++step) {
                        d[order[static_cast<std::size_t>(step)]] = 1;
                        tet[step + 1] = vid(i + d[1], j + d[0], k + d[2]);
                    }
                    c.add_cell(simplex(3), tet);
                }
            }
    return c;
}

/// r x c x s grid of hexahedra, vertices in bottom-face-CCW-then-top-face-CCW
/// order.
inline IndexedComplex gen_hex_grid(int rows, int cols, int slices) {
    require(rows >= 1 && cols >= 1 && slices >= 1, errc::parameter,
            "grid dimensions must be >= 1");
    IndexedComplex c(3);
    for (int i = 0; i <= rows; ++i)
        for (int j = 0; j <= cols; ++j)
            for (int k = 0; k <= slices; ++k) {
                const double p[3] = {static_cast<double>(j), static_cast<double>(i),
                                     static_cast<double>(k)};
                c.add_vertex(p);
            }
    auto vid = [&](int i, int j, int k) {
        return static_cast<index_t>((i * (cols + 1) + j) * (slices + 1) + k);
    };
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            for (int k = 0; k < slices; ++k) {
                // bottom face CCW (z = k), then top face CCW (z = k+1)
                const index_t h[8] = {vid(i, j, k),         vid(i, j + 1, k),
                                      vid(i + 1, j + 1, k), vid(i + 1, j, k),
                                      vid(i, j, k + 1),     vid(i, j + 1, k + 1),
                                      vid(i + 1, j + 1, k + 1), vid(i + 1, j, k + 1)};
                c.add_cell(cube(3), h);
            }
    return c;
}

// ---------------------------------------------------------------------------
// probabilistic Sierpinski filtering
// ---------------------------------------------------------------------------

namespace detail {

struct CoordKey {
    std::vector<double> coords;
    bool operator<(const CoordKey& o) const { return coords < o.coords; }
};

class SimplexRefiner {
public:
    explicit SimplexRefiner(int dim) : dim_(dim) {}

    index_t intern(IndexedComplex& c, const std::vector<double>& coords) {
        auto [it, inserted] = vertex_of_.try_emplace(CoordKey{coords}, c.vertex_count());
        if (inserted) c.add_vertex(coords);
        return it->second;
    }

    std::vector<double> midpoint(const IndexedComplex& c, index_t a, index_t b) const {
        std::vector<double> m(static_cast<std::size_t>(dim_));
        const auto pa = c.vertex(a), pb = c.vertex(b);
        for (int i = 0; i < dim_; ++i) m[static_cast<std::size_t>(i)] = 0.5 * (pa[i] + pb[i]);
        return m;
    }

    /// Regular refinement children of one k-simplex, as vertex-index tuples
    /// over the shared vertex table. Children per parent: 2 for k=1, 4 for
    /// k=2, 8 for k=3 (corner cells plus the standard interior split),
    /// k+1 corner cells for k > 3.
    std::vector<std::vector<index_t>> refine(IndexedComplex& c, std::span<const index_t> s) {
        const int k = dim_from(s);
        auto mid = [&](index_t a, index_t b) { return intern(c, midpoint(c, a, b)); };
        std::vector<std::vector<index_t>> kids;
        if (k == 1) {
            const index_t m = mid(s[0], s[1]);
            kids = {{s[0], m}, {m, s[1]}};
        } else if (k == 2) {
            const index_t m01 = mid(s[0], s[1]), m12 = mid(s[1], s[2]), m02 = mid(s[0], s[2]);
            kids = {{s[0], m01, m02}, {m01, s[1], m12}, {m02, m12, s[2]}, {m01, m12, m02}};
        } else if (k == 3) {
            const index_t m01 = mid(s[0], s[1]), m02 = mid(s[0], s[2]), m03 = mid(s[0], s[3]);
            const index_t m12 = mid(s[1], s[2]), m13 = mid(s[1], s[3]), m23 = mid(s[2], s[3]);
            kids = {{s[0], m01, m02, m03},
                    {m01, s[1], m12, m13},
                    {m02, m12, s[2], m23},
                    {m03, m13, m23, s[3]},
                    // central octahedron split along the m01-m23 diagonal
                    {m01, m23, m02, m12},
                    {m01, m23, m12, m13},
                    {m01, m23, m13, m03},
                    {m01, m23, m03, m02}};
        } else {
            // corner cells only above dimension 3
            for (int i = 0; i <= k; ++i) {
                std::vector<index_t> kid;
                kid.reserve(static_cast<std::size_t>(k + 1));
                kid.push_back(s[static_cast<std::size_t>(i)]);
                for (int j = 0; j <= k; ++j)
                    if (j != i)
                        kid.push_back(mid(s[static_cast<std::size_t>(i)],
                                          s[static_cast<std::size_t>(j)]));
                kids.push_back(std::move(kid));
            }
        }
        return kids;
    }

private:
    static int dim_from(std::span<const index_t> s) { return static_cast<int>(s.size()) - 1; }

    int dim_;
    std::map<CoordKey, index_t> vertex_of_;
};

} // namespace detail

/// Probabilistic Sierpinski filtering: starting from one standard k-simplex,
/// every round regularly refines each surviving simplex and keeps each child
/// independently with probability keep_fraction. Deterministic for a given
/// seed; an empty survivor set yields an empty complex.
inline IndexedComplex gen_sierpinski(int dim, int rounds, double keep_fraction,
                                     std::uint64_t seed) {
    require(dim >= 1, errc::parameter, "simplex dimension must be >= 1");
    require(rounds >= 0, errc::parameter, "rounds must be >= 0");
    require(keep_fraction > 0.0 && keep_fraction <= 1.0, errc::parameter,
            "keep fraction must be in (0, 1]");

    IndexedComplex scratch(dim);
    detail::SimplexRefiner refiner(dim);

    // standard simplex: origin plus the unit axis points
    std::vector<std::vector<index_t>> survivors(1);
    {
        std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
        survivors[0].push_back(refiner.intern(scratch, p));
        for (int i = 0; i < dim; ++i) {
            std::fill(p.begin(), p.end(), 0.0);
            p[static_cast<std::size_t>(i)] = 1.0;
            survivors[0].push_back(refiner.intern(scratch, p));
        }
    }

    std::mt19937_64 rng(seed);
    const bool keep_all = keep_fraction >= 1.0;
    const auto keep_bound = static_cast<std::uint64_t>(
        keep_fraction * 18446744073709551615.0); // 2^64 - 1
    for (int round = 0; round < rounds; ++round) {
        std::vector<std::vector<index_t>> next;
        for (const auto& s : survivors) {
            for (auto& kid : refiner.refine(scratch, s)) {
                if (keep_all || rng() <= keep_bound) next.push_back(std::move(kid));
            }
        }
        survivors = std::move(next);
        if (survivors.empty()) break;
    }

    // compact: only vertices referenced by survivors
    IndexedComplex out(dim);
    std::vector<index_t> remap(static_cast<std::size_t>(scratch.vertex_count()), -1);
    for (const auto& s : survivors)
        for (index_t v : s)
            if (remap[static_cast<std::size_t>(v)] < 0)
                remap[static_cast<std::size_t>(v)] = out.add_vertex(scratch.vertex(v));
    for (const auto& s : survivors) {
        std::vector<index_t> cell;
        cell.reserve(s.size());
        for (index_t v : s) cell.push_back(remap[static_cast<std::size_t>(v)]);
        out.add_cell(simplex(dim), cell);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Vietoris-Rips
// ---------------------------------------------------------------------------

namespace detail {

class CliqueEnumerator {
public:
    CliqueEnumerator(const std::vector<std::vector<index_t>>& adjacency, count_t budget)
        : adj_(adjacency), budget_(budget) {}

    std::vector<std::vector<index_t>> run() {
        std::vector<index_t> r, p, x;
        for (index_t v = 0; v < static_cast<index_t>(adj_.size()); ++v) p.push_back(v);
        expand(r, p, x);
        return std::move(cliques_);
    }

private:
    // Bron-Kerbosch with pivoting; candidate sets are kept sorted.
    void expand(std::vector<index_t>& r, std::vector<index_t> p, std::vector<index_t> x) {
        if (p.empty() && x.empty()) {
            if (r.size() >= 2) {
                require(static_cast<count_t>(cliques_.size()) < budget_, errc::capacity,
                        "maximal clique budget exceeded");
                cliques_.push_back(r);
            }
            return;
        }
        const index_t pivot = choose_pivot(p, x);
        std::vector<index_t> candidates;
        for (index_t v : p)
            if (!adjacent(pivot, v)) candidates.push_back(v);
        for (index_t v : candidates) {
            r.push_back(v);
            expand(r, intersect(p, v), intersect(x, v));
            r.pop_back();
            p.erase(std::find(p.begin(), p.end(), v));
            x.insert(std::lower_bound(x.begin(), x.end(), v), v);
        }
    }

    index_t choose_pivot(const std::vector<index_t>& p, const std::vector<index_t>& x) const {
        index_t best = p.empty() ? x[0] : p[0];
        std::size_t best_deg = 0;
        for (const auto* set : {&p, &x})
            for (index_t v : *set) {
                const std::size_t deg = adj_[static_cast<std::size_t>(v)].size();
                if (deg > best_deg) {
                    best = v;
                    best_deg = deg;
                }
            }
        return best;
    }

    bool adjacent(index_t a, index_t b) const {
        const auto& n = adj_[static_cast<std::size_t>(a)];
        return std::binary_search(n.begin(), n.end(), b);
    }

    std::vector<index_t> intersect(const std::vector<index_t>& set, index_t v) const {
        std::vector<index_t> out;
        const auto& n = adj_[static_cast<std::size_t>(v)];
        std::set_intersection(set.begin(), set.end(), n.begin(), n.end(),
                              std::back_inserter(out));
        return out;
    }

    const std::vector<std::vector<index_t>>& adj_;
    count_t budget_;
    std::vector<std::vector<index_t>> cliques_;
};

} // namespace detail

/// Vietoris-Rips complex of a point set: the neighborhood graph connects
/// pairs at Euclidean distance strictly below epsilon, and the top simplices
/// are its maximal cliques (a clique of size s becomes a Simplex(s-1), with
/// ascending vertex tuple). Isolated points stay plain vertices.
inline IndexedComplex gen_vrips(int ambient_dim, std::span<const double> points, double epsilon,
                                count_t clique_budget = 1000000) {
    require(epsilon > 0.0, errc::parameter, "epsilon must be positive");
    IndexedComplex c(ambient_dim);
    require(points.size() % static_cast<std::size_t>(ambient_dim) == 0, errc::parameter,
            "point array size is not a multiple of the ambient dimension");
    c.raw_coords().assign(points.begin(), points.end());
    const index_t n = c.vertex_count();

    std::vector<std::vector<index_t>> adj(static_cast<std::size_t>(n));
    const double eps2 = epsilon * epsilon;
    for (index_t a = 0; a < n; ++a)
        for (index_t b = a + 1; b < n; ++b) {
            double d2 = 0;
            const auto pa = c.vertex(a), pb = c.vertex(b);
            for (int i = 0; i < ambient_dim; ++i) d2 += (pa[i] - pb[i]) * (pa[i] - pb[i]);
            if (d2 < eps2) {
                adj[static_cast<std::size_t>(a)].push_back(b);
                adj[static_cast<std::size_t>(b)].push_back(a);
            }
        }

    auto cliques = detail::CliqueEnumerator(adj, clique_budget).run();
    for (auto& clique : cliques) std::sort(clique.begin(), clique.end());
    std::sort(cliques.begin(), cliques.end(),
              [](const auto& a, const auto& b) {
                  if (a.size() != b.size()) return a.size() < b.size();
                  return a < b;
              });
    for (const auto& clique : cliques)
        c.add_cell(simplex(static_cast<int>(clique.size()) - 1), clique);
    return c;
}

} // namespace stellar
