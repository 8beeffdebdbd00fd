#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stellar/cp_complex.hpp"
#include "stellar/decomposition.hpp"
#include "stellar/error.hpp"

namespace stellar {

namespace detail {

class LineReader {
public:
    LineReader(std::istream& in, const std::string& path) : in_(in), path_(path) {}

    /// Next non-empty, non-comment line split into tokens.
    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_number_;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            tokens.clear();
            std::istringstream ss(line);
            std::string tok;
            while (ss >> tok) tokens.push_back(tok);
            if (!tokens.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail_here(const std::string& message) const {
        fail(errc::io, path_ + ":" + std::to_string(line_number_) + ": " + message);
    }

    long to_long(const std::string& tok) const {
        try {
            std::size_t used = 0;
            const long v = std::stol(tok, &used);
            if (used != tok.size()) fail_here("malformed integer '" + tok + "'");
            return v;
        } catch (const std::logic_error&) {
            fail_here("malformed integer '" + tok + "'");
        }
    }

    double to_double(const std::string& tok) const {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) fail_here("malformed number '" + tok + "'");
            return v;
        } catch (const std::logic_error&) {
            fail_here("malformed number '" + tok + "'");
        }
    }

    int line_number() const { return line_number_; }

private:
    std::istream& in_;
    std::string path_;
    int line_number_ = 0;
};

inline CellKind parse_kind_token(const LineReader& reader, const std::string& tok, int dim) {
    if (tok == "simplex") return simplex(dim);
    if (tok == "cube") return cube(dim);
    reader.fail_here("unknown cell kind '" + tok + "'");
}

} // namespace detail

/// OFF surface reader: triangle rows become Simplex(2) cells, quad rows
/// Cube(2); any other polygon arity is rejected.
inline IndexedComplex parse_off(std::istream& in, const std::string& path) {
    detail::LineReader reader(in, path);
    std::vector<std::string> tok;
    if (!reader.next(tok)) reader.fail_here("empty OFF file");
    if (tok.size() == 1 && (tok[0] == "OFF" || tok[0] == "off")) {
        if (!reader.next(tok)) reader.fail_here("missing counts line");
    }
    if (tok.size() < 2) reader.fail_here("counts line needs vertex and face counts");
    const long nv = reader.to_long(tok[0]);
    const long nf = reader.to_long(tok[1]);
    if (nv < 0 || nf < 0) reader.fail_here("negative count");

    IndexedComplex c(3);
    for (long v = 0; v < nv; ++v) {
        if (!reader.next(tok)) reader.fail_here("unexpected end of file in vertex block");
        if (tok.size() < 3) reader.fail_here("vertex line needs 3 coordinates");
        const double p[3] = {reader.to_double(tok[0]), reader.to_double(tok[1]),
                             reader.to_double(tok[2])};
        c.add_vertex(p);
    }
    for (long f = 0; f < nf; ++f) {
        if (!reader.next(tok)) reader.fail_here("unexpected end of file in face block");
        const long arity = reader.to_long(tok[0]);
        if (arity != 3 && arity != 4)
            fail(errc::unsupported_cell, path + ":" + std::to_string(reader.line_number()) +
                                             ": OFF polygons must have 3 or 4 vertices");
        if (static_cast<long>(tok.size()) < arity + 1) reader.fail_here("face line too short");
        std::vector<index_t> verts;
        for (long i = 1; i <= arity; ++i)
            verts.push_back(static_cast<index_t>(reader.to_long(tok[static_cast<std::size_t>(i)])));
        c.add_cell(arity == 3 ? simplex(2) : cube(2), verts);
    }
    return c;
}

/// Text format for general indexed CP complexes:
///   line 1:        n |V| |cells|
///   next |V|:      n coordinates
///   next |cells|:  k kind v0 ... vm     (kind: simplex | cube, 0-based ids)
inline IndexedComplex parse_indexed(std::istream& in, const std::string& path) {
    detail::LineReader reader(in, path);
    std::vector<std::string> tok;
    if (!reader.next(tok) || tok.size() < 3) fail(errc::io, path + ": missing header line");
    const int n = static_cast<int>(reader.to_long(tok[0]));
    const long nv = reader.to_long(tok[1]);
    const long nc = reader.to_long(tok[2]);
    if (n < 1 || nv < 0 || nc < 0) reader.fail_here("malformed header");

    IndexedComplex c(n);
    std::vector<double> p(static_cast<std::size_t>(n));
    for (long v = 0; v < nv; ++v) {
        if (!reader.next(tok)) reader.fail_here("unexpected end of file in vertex block");
        if (static_cast<int>(tok.size()) < n) reader.fail_here("vertex line too short");
        for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = reader.to_double(tok[static_cast<std::size_t>(i)]);
        c.add_vertex(p);
    }
    for (long t = 0; t < nc; ++t) {
        if (!reader.next(tok)) reader.fail_here("unexpected end of file in cell block");
        if (tok.size() < 2) reader.fail_here("cell line too short");
        const int k = static_cast<int>(reader.to_long(tok[0]));
        const CellKind kind = detail::parse_kind_token(reader, tok[1], k);
        const index_t arity = kind.arity();
        if (static_cast<long>(tok.size()) != 2 + arity) reader.fail_here("cell line arity mismatch");
        std::vector<index_t> verts;
        for (index_t i = 0; i < arity; ++i)
            verts.push_back(static_cast<index_t>(reader.to_long(tok[static_cast<std::size_t>(2 + i)])));
        c.add_cell(kind, verts);
    }
    return c;
}

/// Soup-of-coordinates format: cells list their corner coordinates and
/// vertices are deduplicated by exact equality.
///   line 1:        n |cells|
///   next |cells|:  k kind x00 ... (arity * n coordinates)
inline IndexedComplex parse_soup(std::istream& in, const std::string& path) {
    detail::LineReader reader(in, path);
    std::vector<std::string> tok;
    if (!reader.next(tok) || tok.size() < 2) fail(errc::io, path + ": missing header line");
    const int n = static_cast<int>(reader.to_long(tok[0]));
    const long nc = reader.to_long(tok[1]);
    if (n < 1 || nc < 0) reader.fail_here("malformed header");

    std::vector<CoordinateSoupCell> cells;
    for (long t = 0; t < nc; ++t) {
        if (!reader.next(tok)) reader.fail_here("unexpected end of file in cell block");
        if (tok.size() < 2) reader.fail_here("cell line too short");
        const int k = static_cast<int>(reader.to_long(tok[0]));
        const CellKind kind = detail::parse_kind_token(reader, tok[1], k);
        const std::size_t expected = static_cast<std::size_t>(kind.arity()) * static_cast<std::size_t>(n);
        if (tok.size() != 2 + expected) reader.fail_here("cell line coordinate count mismatch");
        CoordinateSoupCell cell{kind, {}};
        cell.corner_coords.reserve(expected);
        for (std::size_t i = 0; i < expected; ++i)
            cell.corner_coords.push_back(reader.to_double(tok[2 + i]));
        cells.push_back(std::move(cell));
    }
    return build_from_coordinate_soup(n, cells);
}

enum class MeshFormat { off, indexed, soup };

inline IndexedComplex parse_mesh(const std::string& path, MeshFormat format) {
    std::ifstream in(path);
    require(in.good(), errc::io, "cannot open " + path);
    switch (format) {
        case MeshFormat::off: return parse_off(in, path);
        case MeshFormat::indexed: return parse_indexed(in, path);
        case MeshFormat::soup: return parse_soup(in, path);
    }
    fail(errc::usage, "unknown mesh format");
}

inline void write_indexed(std::ostream& out, const IndexedComplex& c) {
    out << c.ambient_dim() << " " << c.vertex_count() << " " << c.top_cell_count() << "\n";
    char buf[64];
    for (index_t v = 0; v < c.vertex_count(); ++v) {
        const auto p = c.vertex(v);
        for (int i = 0; i < c.ambient_dim(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[i]);
            out << (i ? " " : "") << buf;
        }
        out << "\n";
    }
    for (const auto& bucket : c.buckets()) {
        for (index_t t = 0; t < bucket.size(); ++t) {
            out << bucket.kind().dim << " "
                << (bucket.kind().family == CellFamily::simplex ? "simplex" : "cube");
            for (index_t v : bucket.verts(t)) out << " " << v;
            out << "\n";
        }
    }
}

inline void write_indexed(const std::string& path, const IndexedComplex& c) {
    std::ofstream out(path);
    require(out.good(), errc::io, "cannot open " + path + " for writing");
    write_indexed(out, c);
    require(out.good(), errc::io, "write to " + path + " failed");
}

// ---------------------------------------------------------------------------
// .stellar binary serialization (little-endian, 64-bit counts, 32-bit
// indices, widths recorded in the header)
// ---------------------------------------------------------------------------

namespace detail {

constexpr std::uint32_t stellar_magic = 0x53544C52; // "STLR"
constexpr std::uint32_t stellar_version = 1;

template <class T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    require(in.good(), errc::io, "truncated .stellar payload");
    return value;
}

inline void write_block(std::ostream& out, const StellarTree& tree, index_t id) {
    const Block& b = tree.block(id);
    put<std::uint8_t>(out, b.is_leaf() ? 1 : 0);
    if (b.is_leaf()) {
        if (tree.vertices_reindexed()) {
            put<index_t>(out, b.v_start);
            put<index_t>(out, b.v_end);
        } else {
            put<std::uint64_t>(out, b.vertex_list.size());
            for (index_t v : b.vertex_list) put<index_t>(out, v);
        }
        put<std::uint64_t>(out, b.top_lists.size());
        for (const auto& list : b.top_lists) {
            put<std::uint64_t>(out, list.entry_count());
            for (index_t e : list.entries()) put<index_t>(out, e);
        }
        return;
    }
    const int cn = tree.children_per_brood();
    std::uint64_t mask = 0;
    for (int s = 0; s < cn; ++s)
        if (tree.block(b.brood + s).materialized) mask |= (std::uint64_t{1} << s);
    put<std::uint64_t>(out, mask);
    for (int s = 0; s < cn; ++s)
        if (mask & (std::uint64_t{1} << s)) write_block(out, tree, b.brood + s);
}

} // namespace detail

inline void write_stellar(std::ostream& out, const StellarTree& tree) {
    const auto& c = tree.complex();
    require(c.vertex_count() > 0, errc::empty_complex, "refusing to serialize an empty complex");

    detail::put<std::uint32_t>(out, detail::stellar_magic);
    detail::put<std::uint32_t>(out, detail::stellar_version);
    detail::put<std::uint8_t>(out, sizeof(index_t));
    detail::put<std::uint8_t>(out, 8); // count width
    detail::put<std::uint8_t>(out, static_cast<std::uint8_t>(tree.split_mode()));
    detail::put<std::uint8_t>(out, static_cast<std::uint8_t>(tree.encoding_mode()));
    detail::put<std::uint8_t>(out, tree.vertices_reindexed() ? 1 : 0);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(c.ambient_dim()));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(tree.max_depth()));
    detail::put<std::uint64_t>(out, tree.kv());
    detail::put<std::uint64_t>(out, static_cast<std::uint64_t>(c.vertex_count()));
    detail::put<std::uint64_t>(out, c.buckets().size());

    for (double x : tree.root_lower()) detail::put<double>(out, x);
    for (double x : tree.root_upper()) detail::put<double>(out, x);

    for (double x : c.raw_coords()) detail::put<double>(out, x);
    for (const auto& bucket : c.buckets()) {
        detail::put<std::uint8_t>(out, static_cast<std::uint8_t>(bucket.kind().family));
        detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(bucket.kind().dim));
        detail::put<std::uint64_t>(out, static_cast<std::uint64_t>(bucket.size()));
        for (index_t v : bucket.raw_verts()) detail::put<index_t>(out, v);
    }
    detail::write_block(out, tree, tree.root());
    require(out.good(), errc::io, "stellar write failed");
}

inline void write_stellar(const std::string& path, const StellarTree& tree) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), errc::io, "cannot open " + path + " for writing");
    write_stellar(out, tree);
}

namespace detail {

inline void read_block(std::istream& in, StellarTree& tree, index_t id, std::size_t bucket_count) {
    const std::uint8_t tag = get<std::uint8_t>(in);
    Block& header = tree.block(id);
    header.materialized = true;
    if (tag == 1) {
        if (tree.vertices_reindexed()) {
            tree.block(id).v_start = get<index_t>(in);
            tree.block(id).v_end = get<index_t>(in);
        } else {
            const std::uint64_t nv = get<std::uint64_t>(in);
            auto& list = tree.block(id).vertex_list;
            list.resize(nv);
            for (auto& v : list) v = get<index_t>(in);
        }
        const std::uint64_t lists = get<std::uint64_t>(in);
        require(lists == bucket_count, errc::corruption, "leaf list count mismatch");
        auto& top = tree.block(id).top_lists;
        top.clear();
        for (std::uint64_t li = 0; li < lists; ++li) {
            const std::uint64_t entries = get<std::uint64_t>(in);
            std::vector<index_t> raw(entries);
            for (auto& e : raw) e = get<index_t>(in);
            top.emplace_back(std::move(raw));
        }
        return;
    }
    require(tag == 0, errc::corruption, "unknown block tag");
    const std::uint64_t mask = get<std::uint64_t>(in);
    const int cn = tree.children_per_brood();
    const index_t brood = static_cast<index_t>(tree.blocks().size());
    tree.block(id).brood = brood;
    for (int s = 0; s < cn; ++s) {
        Block child;
        child.parent = id;
        tree.blocks().push_back(std::move(child));
    }
    for (int s = 0; s < cn; ++s)
        if (mask & (std::uint64_t{1} << s)) read_block(in, tree, brood + s, bucket_count);
}

} // namespace detail

inline StellarTree read_stellar(std::istream& in) {
    const auto magic = detail::get<std::uint32_t>(in);
    require(magic == detail::stellar_magic, errc::bad_magic, "not a .stellar file");
    const auto version = detail::get<std::uint32_t>(in);
    require(version == detail::stellar_version, errc::bad_version,
            "unsupported .stellar version " + std::to_string(version));
    const auto index_width = detail::get<std::uint8_t>(in);
    require(index_width == sizeof(index_t), errc::bad_version, "unsupported index width");
    const auto count_width = detail::get<std::uint8_t>(in);
    require(count_width == 8, errc::bad_version, "unsupported count width");
    const auto split = static_cast<SplitMode>(detail::get<std::uint8_t>(in));
    const auto encoding = static_cast<EncodingMode>(detail::get<std::uint8_t>(in));
    const bool reindexed = detail::get<std::uint8_t>(in) != 0;
    const auto ambient_dim = detail::get<std::uint32_t>(in);
    const auto max_depth = detail::get<std::uint32_t>(in);
    const auto kv = detail::get<std::uint64_t>(in);
    const auto vertex_count = detail::get<std::uint64_t>(in);
    const auto bucket_count = detail::get<std::uint64_t>(in);

    std::vector<double> lower(ambient_dim), upper(ambient_dim);
    for (auto& x : lower) x = detail::get<double>(in);
    for (auto& x : upper) x = detail::get<double>(in);

    IndexedComplex complex(static_cast<int>(ambient_dim));
    complex.raw_coords().resize(vertex_count * ambient_dim);
    for (auto& x : complex.raw_coords()) x = detail::get<double>(in);
    for (std::uint64_t b = 0; b < bucket_count; ++b) {
        const auto family = static_cast<CellFamily>(detail::get<std::uint8_t>(in));
        const auto dim = detail::get<std::uint32_t>(in);
        const auto count = detail::get<std::uint64_t>(in);
        const CellKind kind{family, static_cast<int>(dim)};
        std::vector<index_t> verts(count * static_cast<std::uint64_t>(kind.arity()));
        for (auto& v : verts) v = detail::get<index_t>(in);
        // cells were validated when the tree was built
        for (std::uint64_t t = 0; t < count; ++t)
            complex.add_cell(kind, std::span<const index_t>(
                                       verts.data() + t * static_cast<std::uint64_t>(kind.arity()),
                                       static_cast<std::size_t>(kind.arity())));
    }

    StellarTree tree;
    tree.complex() = std::move(complex);
    tree.set_build_metadata(kv, split, static_cast<int>(max_depth), std::move(lower),
                            std::move(upper));
    tree.blocks().push_back(Block{});
    if (reindexed) tree.mark_vertices_reindexed();
    detail::read_block(in, tree, tree.root(), bucket_count);

    // internal ranges and the vertex->leaf map are derived, not stored
    tree.refresh_leaf_order();
    if (reindexed) {
        auto fix_ranges = [&](auto&& self, index_t id) -> std::pair<index_t, index_t> {
            Block& b = tree.block(id);
            if (!b.materialized) return {-1, -1};
            if (b.is_leaf()) return {b.v_start, b.v_end};
            index_t lo = -1, hi = -1;
            const int cn = tree.children_per_brood();
            for (int s = 0; s < cn; ++s) {
                auto [clo, chi] = self(self, b.brood + s);
                if (clo < 0) continue;
                if (lo < 0) lo = clo;
                hi = chi;
            }
            b.v_start = lo;
            b.v_end = hi;
            return {lo, hi};
        };
        fix_ranges(fix_ranges, tree.root());
    } else {
        std::vector<index_t> vertex_leaf(vertex_count, -1);
        for (index_t leaf : tree.leaf_order())
            for (index_t v : tree.block(leaf).vertex_list)
                vertex_leaf[static_cast<std::size_t>(v)] = leaf;
        tree.set_vertex_leaf(std::move(vertex_leaf));
    }
    tree.set_encoding_mode(encoding);
    return tree;
}

inline StellarTree read_stellar(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), errc::io, "cannot open " + path);
    return read_stellar(in);
}

} // namespace stellar
