// Command-line front end: build Stellar trees from mesh files, report
// storage statistics, run batched topological extractions and generate
// half-edge / IA / IA* structures.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <stellar/stellar.hpp>

namespace {

using nlohmann::ordered_json;
using namespace stellar;

struct TreeInput {
    StellarTree tree;
    // new-index -> input-index maps; empty when identity (e.g. .stellar input)
    std::vector<index_t> vertex_to_input;
    std::vector<std::vector<index_t>> cell_to_input; // per bucket
    PhaseTimings timings;
    bool built_here = false;
};

count_t parse_kv(const std::string& text) {
    if (text == "inf") return kv_infinite;
    try {
        const long long v = std::stoll(text);
        require(v >= 1, errc::parameter, "kv must be >= 1 or 'inf'");
        return static_cast<count_t>(v);
    } catch (const std::logic_error&) {
        fail(errc::parameter, "kv must be an integer or 'inf'");
    }
}

MeshFormat detect_format(const std::string& path, const std::string& flag) {
    if (flag == "off") return MeshFormat::off;
    if (flag == "indexed") return MeshFormat::indexed;
    if (flag == "soup") return MeshFormat::soup;
    if (flag != "auto") fail(errc::usage, "unknown format '" + flag + "'");
    if (path.ends_with(".off")) return MeshFormat::off;
    if (path.ends_with(".soup")) return MeshFormat::soup;
    return MeshFormat::indexed;
}

EncodingMode parse_encoding(const std::string& text) {
    if (text == "explicit") return EncodingMode::explicit_lists;
    if (text == "vertex_compressed") return EncodingMode::vertex_compressed;
    if (text == "compressed") return EncodingMode::compressed;
    fail(errc::usage, "unknown encoding '" + text + "'");
}

PipelineOptions parse_split(const std::string& text) {
    PipelineOptions opts;
    if (text == "auto") return opts;
    opts.auto_split = false;
    if (text == "quad")
        opts.split_mode = SplitMode::quadtree;
    else if (text == "kd")
        opts.split_mode = SplitMode::kd;
    else
        fail(errc::usage, "unknown split mode '" + text + "'");
    return opts;
}

void validate_threads(int threads) {
    // execution is sequential regardless; the flag pins reproducibility
    if (threads != 0) {
        require(threads >= 1, errc::parameter, "--threads must be >= 1");
        return;
    }
    if (const char* env = std::getenv("STELLAR_THREADS"))
        require(std::atoi(env) >= 1, errc::parameter, "STELLAR_THREADS must be >= 1");
}

/// Loads a prebuilt .stellar file or runs the pipeline on a mesh file.
TreeInput load_tree(const std::string& path, const std::string& format, const std::string& kv_text,
                    const std::string& encoding, const std::string& split, int max_depth) {
    TreeInput input;
    if (format == "stellar" || (format == "auto" && path.ends_with(".stellar"))) {
        input.tree = read_stellar(path);
        return input;
    }
    IndexedComplex complex = parse_mesh(path, detect_format(path, format));
    PipelineOptions opts = parse_split(split);
    opts.max_depth = max_depth;
    PipelineResult result = run_pipeline(std::move(complex), parse_kv(kv_text),
                                         parse_encoding(encoding), opts);
    input.timings = result.timings;
    input.built_here = true;
    // invert the permutations so reports can speak in input ids
    if (!result.vertex_permutation.empty()) {
        input.vertex_to_input.resize(result.vertex_permutation.size());
        for (std::size_t old_id = 0; old_id < result.vertex_permutation.size(); ++old_id)
            input.vertex_to_input[static_cast<std::size_t>(
                result.vertex_permutation[old_id])] = static_cast<index_t>(old_id);
    }
    if (!result.cell_permutations.empty()) {
        input.cell_to_input.resize(result.cell_permutations.size());
        for (std::size_t b = 0; b < result.cell_permutations.size(); ++b) {
            input.cell_to_input[b].resize(result.cell_permutations[b].size());
            for (std::size_t old_id = 0; old_id < result.cell_permutations[b].size(); ++old_id)
                input.cell_to_input[b][static_cast<std::size_t>(
                    result.cell_permutations[b][old_id])] = static_cast<index_t>(old_id);
        }
    }
    input.tree = std::move(result.tree);
    return input;
}

index_t map_vertex(const TreeInput& in, index_t v) {
    return in.vertex_to_input.empty() ? v : in.vertex_to_input[static_cast<std::size_t>(v)];
}

index_t map_cell(const TreeInput& in, std::uint32_t bucket, index_t t) {
    if (in.cell_to_input.empty() || in.cell_to_input[bucket].empty()) return t;
    return in.cell_to_input[bucket][static_cast<std::size_t>(t)];
}

std::string cell_tag(const IndexedComplex& c, std::uint32_t bucket, index_t t) {
    const CellKind kind = c.bucket(bucket).kind();
    return (kind.family == CellFamily::simplex ? "s" : "c") + std::to_string(kind.dim) + ":" +
           std::to_string(t);
}

ordered_json timings_json(const PhaseTimings& t) {
    return ordered_json{{"insert_vertices_s", t.insert_vertices_s},
                        {"reindex_vertices_s", t.reindex_vertices_s},
                        {"insert_cells_s", t.insert_cells_s},
                        {"reindex_cells_s", t.reindex_cells_s},
                        {"total_s", t.total_s}};
}

ordered_json stats_json(const StellarTree& tree, const TreeStats& s, unsigned ref_width) {
    ordered_json j;
    j["vertices"] = s.vertex_count;
    j["top_cells"] = s.top_cell_count;
    j["kv"] = tree.kv() == kv_infinite ? ordered_json("inf") : ordered_json(tree.kv());
    j["split_mode"] = split_mode_name(tree.split_mode());
    j["encoding"] = encoding_mode_name(s.encoding);
    j["blocks"] = s.blocks_total;
    j["internal_blocks"] = s.blocks_internal;
    j["leaf_blocks"] = s.blocks_leaf;
    j["chi"] = s.chi;
    j["mu"] = s.mu;
    j["costs"] = ordered_json{{"hierarchy_refs", s.cost_hierarchy_refs},
                              {"vertex_list_refs", s.cost_vertex_lists_refs},
                              {"cell_list_refs", s.cost_cell_lists_refs},
                              {"tree_total_refs", s.total_tree_refs()},
                              {"indexed_refs", s.cost_indexed_refs},
                              {"reference_width_bytes", ref_width},
                              {"tree_total_bytes", s.bytes(s.total_tree_refs(), ref_width)},
                              {"indexed_bytes", s.bytes(s.cost_indexed_refs, ref_width)}};
    return j;
}

// --- extract dumps -------------------------------------------------------

void dump_pcells(TreeInput& in, int p, LeafCache& cache, std::ostream& out) {
    visit_leaves(in.tree, cache, [&](ExpandedLeaf& leaf) {
        const Block& b = in.tree.block(leaf.leaf());
        const auto& cells = leaf.p_cells(p);
        out << "leaf " << (in.tree.vertices_reindexed() ? b.v_start : leaf.leaf())
            << " pcells p=" << p << " count=" << cells.size() << "\n";
        for (index_t id = 0; id < cells.size(); ++id) {
            out << id;
            for (index_t v : cells.canonical[static_cast<std::size_t>(id)]) out << " " << v;
            out << "\n";
        }
    });
}

void dump_r0k(TreeInput& in, int k, LeafCache& cache, std::ostream& out) {
    std::vector<std::string> lines(static_cast<std::size_t>(in.tree.complex().vertex_count()));
    visit_leaves(in.tree, cache, [&](ExpandedLeaf& leaf) {
        const auto& lists = leaf.restricted_vertex_coboundary(k);
        for (index_t slot = 0; slot < leaf.local_vertex_count(); ++slot) {
            const index_t v = leaf.vertex_at_slot(slot);
            std::ostringstream ss;
            ss << v;
            for (const auto& ref : lists[static_cast<std::size_t>(slot)])
                ss << " " << cell_tag(in.tree.complex(), ref.bucket, ref.index);
            lines[static_cast<std::size_t>(v)] = ss.str();
        }
    });
    for (auto& line : lines)
        if (!line.empty()) out << line << "\n";
}

void dump_rpq(TreeInput& in, int p, int q, LeafCache& cache, std::ostream& out) {
    visit_leaves(in.tree, cache, [&](ExpandedLeaf& leaf) {
        const Block& b = in.tree.block(leaf.leaf());
        const auto& rel = leaf.general_coboundary(p, q);
        out << "leaf " << (in.tree.vertices_reindexed() ? b.v_start : leaf.leaf()) << " rpq p=" << p
            << " q=" << q << "\n";
        if (p > 0) {
            const auto& cells = leaf.p_cells(p);
            for (index_t id = 0; id < cells.size(); ++id) {
                out << "p " << id;
                for (index_t v : cells.canonical[static_cast<std::size_t>(id)]) out << " " << v;
                out << "\n";
            }
        }
        for (std::size_t src = 0; src < rel.size(); ++src) {
            out << "r " << src << " :";
            for (index_t qi : rel[src]) out << " " << qi;
            out << "\n";
        }
    });
}

// --- generator dumps (input-id space, byte-stable across kv) --------------

void dump_adjacency(const TreeInput& in, const IAStarStructure& s, std::ostream& out) {
    const auto& complex = in.tree.complex();

    // nm table first so slots can reference entries by ordinal
    std::vector<std::pair<std::vector<index_t>, std::vector<std::string>>> nm_entries;
    for (const auto& [face, cofaces] : s.nm_cofaces) {
        std::vector<index_t> mapped;
        mapped.reserve(face.size());
        for (index_t v : face) mapped.push_back(map_vertex(in, v));
        std::sort(mapped.begin(), mapped.end());
        std::vector<std::string> tags;
        for (const auto& ref : cofaces)
            tags.push_back(cell_tag(complex, ref.bucket, map_cell(in, ref.bucket, ref.index)));
        std::sort(tags.begin(), tags.end());
        nm_entries.push_back({std::move(mapped), std::move(tags)});
    }
    std::sort(nm_entries.begin(), nm_entries.end());
    std::map<std::vector<index_t>, std::size_t> nm_ordinal;
    for (std::size_t i = 0; i < nm_entries.size(); ++i) nm_ordinal[nm_entries[i].first] = i;

    for (std::uint32_t bi = 0; bi < complex.buckets().size(); ++bi) {
        const auto& bucket = complex.bucket(bi);
        if (bucket.size() == 0 || s.slots[bi].empty()) continue;
        const index_t fcount =
            static_cast<index_t>(boundary_face_count(bucket.kind(), bucket.kind().dim - 1));
        // rows in input order
        std::vector<index_t> order(static_cast<std::size_t>(bucket.size()));
        for (index_t t = 0; t < bucket.size(); ++t)
            order[static_cast<std::size_t>(map_cell(in, bi, t))] = t;
        for (index_t row = 0; row < bucket.size(); ++row) {
            const index_t t = order[static_cast<std::size_t>(row)];
            out << "t " << cell_tag(complex, bi, row) << " :";
            for (index_t j = 0; j < fcount; ++j) {
                const auto& slot =
                    s.slots[bi][static_cast<std::size_t>(t) * fcount + static_cast<std::size_t>(j)];
                switch (slot.state) {
                    case SlotState::unknown: out << " u"; break;
                    case SlotState::boundary: out << " b"; break;
                    case SlotState::adjacent:
                        out << " "
                            << cell_tag(complex, slot.cell.bucket,
                                        map_cell(in, slot.cell.bucket, slot.cell.index));
                        break;
                    case SlotState::non_manifold: {
                        auto faces = boundary_faces(bucket.kind(), bucket.verts(t),
                                                    bucket.kind().dim - 1);
                        std::vector<index_t> key;
                        for (index_t v : faces[static_cast<std::size_t>(j)])
                            key.push_back(map_vertex(in, v));
                        std::sort(key.begin(), key.end());
                        out << " n:" << nm_ordinal.at(key);
                        break;
                    }
                }
            }
            out << "\n";
        }
    }
    for (std::size_t i = 0; i < nm_entries.size(); ++i) {
        out << "nm " << i << " f";
        for (index_t v : nm_entries[i].first) out << " " << v;
        out << " :";
        for (const auto& tag : nm_entries[i].second) out << " " << tag;
        out << "\n";
    }
}

void dump_iastar_extras(const TreeInput& in, const IAStarStructure& s, std::ostream& out) {
    const auto& complex = in.tree.complex();
    const index_t nv = complex.vertex_count();
    for (const auto& [dim, reps] : s.vertex_reps) {
        std::vector<count_t> counts(static_cast<std::size_t>(nv), 0);
        for (index_t v = 0; v < nv; ++v)
            counts[static_cast<std::size_t>(map_vertex(in, v))] =
                reps[static_cast<std::size_t>(v)].size();
        for (index_t v = 0; v < nv; ++v)
            if (counts[static_cast<std::size_t>(v)] > 0)
                out << "clusters k=" << dim << " v " << v << " : "
                    << counts[static_cast<std::size_t>(v)] << "\n";
    }
    if (!s.vertex_top_edges.empty()) {
        std::vector<index_t> tree_id_of_input(static_cast<std::size_t>(nv));
        for (index_t t = 0; t < nv; ++t)
            tree_id_of_input[static_cast<std::size_t>(map_vertex(in, t))] = t;
        for (index_t input_v = 0; input_v < nv; ++input_v) {
            const index_t v = tree_id_of_input[static_cast<std::size_t>(input_v)];
            const auto& edges = s.vertex_top_edges[static_cast<std::size_t>(v)];
            if (edges.empty()) continue;
            std::vector<std::string> tags;
            for (const auto& ref : edges)
                tags.push_back(cell_tag(complex, ref.bucket, map_cell(in, ref.bucket, ref.index)));
            std::sort(tags.begin(), tags.end());
            out << "r01 v " << input_v << " :";
            for (const auto& tag : tags) out << " " << tag;
            out << "\n";
        }
    }
}

void dump_halfedge(const TreeInput& in, const HalfEdgeStructure& s, std::ostream& out) {
    const auto& complex = in.tree.complex();
    auto adjacency = s.face_adjacency();
    // rows in input order per bucket
    std::vector<std::pair<std::pair<std::uint32_t, index_t>, const std::vector<TopCellRef>*>> rows;
    for (const auto& [face, row] : adjacency)
        rows.push_back({{face.bucket, map_cell(in, face.bucket, face.index)}, &row});
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [key, row] : rows) {
        out << "f " << cell_tag(complex, key.first, key.second) << " :";
        for (const auto& opp : *row) {
            if (opp.index < 0)
                out << " b";
            else
                out << " " << cell_tag(complex, opp.bucket, map_cell(in, opp.bucket, opp.index));
        }
        out << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stellar tree toolkit: compact topological indexing of CP complexes"};
    app.require_subcommand(1);

    std::string input, output, format = "auto", kv_text = "100";
    std::string encoding = "compressed", split = "auto", out_format = "json";
    std::string relation, mode = "global", timings_path;
    int max_depth = 64, threads = 0;
    std::size_t cache_capacity = 16;
    unsigned ref_width = 4;
    double budget = 1e8;

    auto add_tree_inputs = [&](CLI::App* cmd, bool kv_required) {
        cmd->add_option("--input", input, "input mesh or .stellar file")->required();
        cmd->add_option("--format", format, "off | indexed | soup | stellar | auto");
        auto* kv_opt = cmd->add_option("--kv", kv_text, "bucketing threshold (integer or 'inf')");
        if (kv_required) kv_opt->required();
        cmd->add_option("--encoding", encoding, "explicit | vertex_compressed | compressed");
        cmd->add_option("--split", split, "auto | quad | kd");
        cmd->add_option("--max-depth", max_depth, "split cap per axis");
        cmd->add_option("--threads", threads, "worker count (sequential execution; >=1)");
    };

    auto* cmd_build = app.add_subcommand("build", "run the generation pipeline, write a .stellar file");
    add_tree_inputs(cmd_build, false);
    cmd_build->add_option("--output", output, "output .stellar path")->required();
    cmd_build->add_option("--timings-csv", timings_path, "append phase timings as a CSV row");

    auto* cmd_stats = app.add_subcommand("stats", "report spanning/reference numbers and costs");
    add_tree_inputs(cmd_stats, false);
    cmd_stats->add_option("--report", out_format, "json | csv | both");
    cmd_stats->add_option("--ref-width", ref_width, "bytes per reference for byte totals");

    auto* cmd_extract = app.add_subcommand("extract", "dump a topological relation");
    add_tree_inputs(cmd_extract, false);
    cmd_extract->add_option("--relation", relation, "pcells:P | r0k:K | rpq:P,Q")->required();
    cmd_extract->add_option("--cache", cache_capacity, "LRU cache capacity in blocks");
    cmd_extract->add_option("--budget", budget, "max projected faces per leaf extraction");

    auto* cmd_ia = app.add_subcommand("gen-ia", "generate the adjacency structure (manifold path)");
    add_tree_inputs(cmd_ia, false);
    cmd_ia->add_option("--mode", mode, "local | global");

    auto* cmd_iastar = app.add_subcommand("gen-iastar", "generate the adjacency structure (general path)");
    add_tree_inputs(cmd_iastar, false);
    cmd_iastar->add_option("--mode", mode, "local | global");

    auto* cmd_he = app.add_subcommand("gen-halfedge", "generate the half-edge structure");
    add_tree_inputs(cmd_he, false);
    cmd_he->add_option("--mode", mode, "local | global");

    auto* cmd_synth = app.add_subcommand("synth", "generate synthetic datasets");
    std::string synth_kind, grid_type = "tri2d", dims_text = "8,8", points_path;
    int s_dim = 2, s_rounds = 3;
    double s_keep = 0.65, epsilon = 0.5;
    std::uint64_t s_seed = 7, clique_budget = 1000000;
    cmd_synth->add_option("kind", synth_kind, "grid | sierpinski | vrips")->required();
    cmd_synth->add_option("--output", output, "output mesh path (indexed format)")->required();
    cmd_synth->add_option("--type", grid_type, "tri2d | quad2d | tet3d | hex3d | torus_quad");
    cmd_synth->add_option("--dims", dims_text, "comma-separated grid dimensions");
    cmd_synth->add_option("--dim", s_dim, "simplex dimension (sierpinski)");
    cmd_synth->add_option("--rounds", s_rounds, "refinement rounds (sierpinski)");
    cmd_synth->add_option("--keep", s_keep, "survival fraction (sierpinski)");
    cmd_synth->add_option("--seed", s_seed, "random seed (sierpinski)");
    cmd_synth->add_option("--points", points_path, "point file, indexed format (vrips)");
    cmd_synth->add_option("--epsilon", epsilon, "neighborhood radius (vrips)");
    cmd_synth->add_option("--clique-budget", clique_budget, "maximal clique cap (vrips)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        validate_threads(threads);

        if (cmd_synth->parsed()) {
            IndexedComplex c;
            if (synth_kind == "grid") {
                std::vector<int> dims;
                std::stringstream ss(dims_text);
                std::string tok;
                while (std::getline(ss, tok, ',')) dims.push_back(std::stoi(tok));
                auto need = [&](std::size_t n) {
                    require(dims.size() == n, errc::usage, "--dims needs " + std::to_string(n) +
                                                               " values for " + grid_type);
                };
                if (grid_type == "tri2d") {
                    need(2);
                    c = gen_tri_grid(dims[0], dims[1]);
                } else if (grid_type == "quad2d") {
                    need(2);
                    c = gen_quad_grid(dims[0], dims[1]);
                } else if (grid_type == "torus_quad") {
                    need(2);
                    c = gen_torus_quad_grid(dims[0], dims[1]);
                } else if (grid_type == "tet3d") {
                    need(3);
                    c = gen_tet_grid(dims[0], dims[1], dims[2]);
                } else if (grid_type == "hex3d") {
                    need(3);
                    c = gen_hex_grid(dims[0], dims[1], dims[2]);
                } else {
                    fail(errc::usage, "unknown grid type '" + grid_type + "'");
                }
            } else if (synth_kind == "sierpinski") {
                c = gen_sierpinski(s_dim, s_rounds, s_keep, s_seed);
                if (c.vertex_count() == 0)
                    std::cerr << "warning: empty survivor set; wrote an empty complex\n";
            } else if (synth_kind == "vrips") {
                IndexedComplex pts = parse_mesh(points_path, MeshFormat::indexed);
                c = gen_vrips(pts.ambient_dim(), pts.raw_coords(), epsilon, clique_budget);
            } else {
                fail(errc::usage, "unknown synth kind '" + synth_kind + "'");
            }
            write_indexed(output, c);
            return 0;
        }

        TreeInput in = load_tree(input, format, kv_text, encoding, split, max_depth);

        if (cmd_build->parsed()) {
            write_stellar(output, in.tree);
            ordered_json j;
            j["output"] = output;
            j["timings"] = timings_json(in.timings);
            std::cout << j.dump(2) << "\n";
            if (!timings_path.empty()) {
                std::ofstream csv(timings_path, std::ios::app);
                require(csv.good(), errc::io, "cannot open " + timings_path);
                csv << in.timings.insert_vertices_s << "," << in.timings.reindex_vertices_s << ","
                    << in.timings.insert_cells_s << "," << in.timings.reindex_cells_s << ","
                    << in.timings.total_s << "\n";
            }
            return 0;
        }

        if (cmd_stats->parsed()) {
            const TreeStats s = compute_stats(in.tree);
            if (out_format == "json" || out_format == "both")
                std::cout << stats_json(in.tree, s, ref_width).dump(2) << "\n";
            if (out_format == "csv" || out_format == "both")
                std::cout << stats_csv_header() << "\n" << stats_csv_row(s, in.tree.kv()) << "\n";
            return 0;
        }

        if (cmd_extract->parsed()) {
            QueryBudget qb{budget};
            LeafCache cache(cache_capacity, qb);
            const auto colon = relation.find(':');
            require(colon != std::string::npos, errc::usage,
                    "--relation must look like pcells:P, r0k:K or rpq:P,Q");
            const std::string what = relation.substr(0, colon);
            const std::string args = relation.substr(colon + 1);
            if (what == "pcells") {
                dump_pcells(in, std::stoi(args), cache, std::cout);
            } else if (what == "r0k") {
                dump_r0k(in, std::stoi(args), cache, std::cout);
            } else if (what == "rpq") {
                const auto comma = args.find(',');
                require(comma != std::string::npos, errc::usage, "rpq needs P,Q");
                dump_rpq(in, std::stoi(args.substr(0, comma)), std::stoi(args.substr(comma + 1)),
                         cache, std::cout);
            } else {
                fail(errc::usage, "unknown relation '" + what + "'");
            }
            std::cerr << "cache: capacity=" << cache.capacity() << " expansions="
                      << cache.expansions() << " hits=" << cache.hits() << "\n";
            return 0;
        }

        const GenMode gen_mode = [&] {
            if (mode == "local") return GenMode::local;
            if (mode == "global") return GenMode::global;
            fail(errc::usage, "--mode must be local or global");
        }();

        const auto wall_start = std::chrono::steady_clock::now();
        auto wall_ms = [&] {
            return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             wall_start)
                .count();
        };

        if (cmd_ia->parsed() || cmd_iastar->parsed()) {
            const IAGenReport report =
                cmd_ia->parsed() ? gen_ia(in.tree, gen_mode) : gen_iastar(in.tree, gen_mode);
            dump_adjacency(in, report.structure, std::cout);
            if (cmd_iastar->parsed()) dump_iastar_extras(in, report.structure, std::cout);
            ordered_json j;
            j["mode"] = mode;
            j["leaves"] = report.leaves_processed;
            j["aux_peak_entries"] = report.aux_peak_entries;
            j["boundary_slots"] = report.structure.boundary_slots();
            j["nm_faces"] = report.structure.nm_cofaces.size();
            j["wall_ms"] = wall_ms();
            std::cerr << j.dump(2) << "\n";
            return 0;
        }

        if (cmd_he->parsed()) {
            ordered_json j;
            j["mode"] = mode;
            if (gen_mode == GenMode::global) {
                const HalfEdgeGenReport report = gen_halfedge_global(in.tree);
                dump_halfedge(in, report.structure, std::cout);
                j["half_edges"] = report.structure.half_edges.size();
                j["paired"] = report.structure.paired_half_edges;
                j["boundary"] = report.structure.boundary_half_edges();
                j["aux_peak_entries"] = report.aux_peak_entries;
            } else {
                count_t total_he = 0;
                const HalfEdgeGenReport report =
                    gen_halfedge_local(in.tree, [&](index_t leaf, const HalfEdgeStructure& s) {
                        const Block& b = in.tree.block(leaf);
                        std::cout << "leaf "
                                  << (in.tree.vertices_reindexed() ? b.v_start : leaf) << "\n";
                        dump_halfedge(in, s, std::cout);
                        total_he += s.half_edges.size();
                    });
                j["half_edges"] = total_he;
                j["aux_peak_entries"] = report.aux_peak_entries;
            }
            j["wall_ms"] = wall_ms();
            std::cerr << j.dump(2) << "\n";
            return 0;
        }

        fail(errc::usage, "no subcommand handled");
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
}
