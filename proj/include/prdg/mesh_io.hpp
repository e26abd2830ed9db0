#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "prdg/errors.hpp"
#include "prdg/mesh.hpp"

namespace prdg {

namespace detail {

class line_reader {
public:
    line_reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

    /* Next non-empty line; false on EOF. */
    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++lineno_;
            if (line.find_first_not_of(" \t\r\n") != std::string::npos)
                return true;
        }
        return false;
    }

    std::string require(const std::string& what) {
        std::string line;
        if (!next(line))
            throw parse_error(path_, lineno_ + 1, "unexpected end of file, expected " + what);
        return line;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw parse_error(path_, lineno_, what);
    }

    size_t lineno() const { return lineno_; }

private:
    std::istream& in_;
    std::string path_;
    size_t lineno_ = 0;
};

inline std::string format_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/* Native mesh format:
 *   line 1:       NV NC
 *   NV lines:     x y
 *   NC lines:     k i1 ... ik     (0-based vertex indices, CCW)
 */
inline poly_mesh read_native(std::istream& in, const std::string& path = "<stream>") {
    detail::line_reader rd(in, path);

    long nv = -1, nc = -1;
    {
        std::istringstream ss(rd.require("vertex/cell counts"));
        if (!(ss >> nv >> nc) || nv < 0 || nc < 0)
            rd.fail("expected 'NV NC'");
    }

    std::vector<vec2> vertices;
    vertices.reserve(size_t(nv));
    for (long i = 0; i < nv; ++i) {
        std::istringstream ss(rd.require("vertex coordinates"));
        double x, y;
        if (!(ss >> x >> y))
            rd.fail("expected 'x y' for vertex " + std::to_string(i));
        vertices.emplace_back(x, y);
    }

    std::vector<std::vector<int>> cells;
    cells.reserve(size_t(nc));
    for (long c = 0; c < nc; ++c) {
        std::istringstream ss(rd.require("cell vertex list"));
        int k;
        if (!(ss >> k) || k < 3)
            rd.fail("expected vertex count >= 3 for cell " + std::to_string(c));
        std::vector<int> loop(static_cast<size_t>(k));
        for (int j = 0; j < k; ++j) {
            if (!(ss >> loop[size_t(j)]))
                rd.fail("expected " + std::to_string(k) + " vertex indices for cell " +
                        std::to_string(c));
            if (loop[size_t(j)] < 0 || loop[size_t(j)] >= nv)
                rd.fail("vertex index out of range in cell " + std::to_string(c));
        }
        cells.push_back(std::move(loop));
    }
    return build_mesh(std::move(vertices), std::move(cells));
}

inline poly_mesh read_native(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open mesh file: " + path);
    return read_native(in, path);
}

/* Coordinates are written with 17 significant digits so read(write(mesh))
 * reproduces the doubles bit-exactly. */
inline void write_native(std::ostream& out, const poly_mesh& mesh) {
    out << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
    for (const vec2& v : mesh.vertices)
        out << detail::format_coord(v.x) << ' ' << detail::format_coord(v.y) << '\n';
    for (const auto& loop : mesh.cells) {
        out << loop.size();
        for (int v : loop) out << ' ' << v;
        out << '\n';
    }
}

inline void write_native(const std::string& path, const poly_mesh& mesh) {
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open file for writing: " + path);
    write_native(out, mesh);
}

/* Gmsh MSH 2.2 ASCII subset: $Nodes and $Elements sections; element types
 * 2 (triangle) and 3 (quadrangle) become cells, anything else is skipped
 * with a warning. */
inline poly_mesh import_msh(std::istream& in, const std::string& path = "<stream>",
                            std::vector<std::string>* warnings = nullptr) {
    detail::line_reader rd(in, path);
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };

    std::map<long, int> node_id_map;
    std::vector<vec2> nodes;
    std::vector<std::vector<long>> raw_cells; // gmsh node ids
    bool saw_nodes = false, saw_elements = false;

    std::string line;
    while (rd.next(line)) {
        if (line.rfind("$MeshFormat", 0) == 0) {
            std::istringstream ss(rd.require("format line"));
            double version;
            int file_type;
            if (!(ss >> version >> file_type))
                rd.fail("malformed $MeshFormat line");
            if (file_type != 0)
                rd.fail("binary MSH files are not supported");
            if (version < 2.0 || version >= 3.0)
                rd.fail("unsupported MSH version (need 2.x ASCII)");
            if (rd.require("$EndMeshFormat").rfind("$EndMeshFormat", 0) != 0)
                rd.fail("expected $EndMeshFormat");
        } else if (line.rfind("$Nodes", 0) == 0) {
            saw_nodes = true;
            long n;
            {
                std::istringstream ss(rd.require("node count"));
                if (!(ss >> n) || n < 0) rd.fail("expected node count");
            }
            for (long i = 0; i < n; ++i) {
                std::istringstream ss(rd.require("node line"));
                long id;
                double x, y, z;
                if (!(ss >> id >> x >> y >> z))
                    rd.fail("expected 'id x y z' node line");
                node_id_map.emplace(id, int(nodes.size()));
                nodes.emplace_back(x, y);
            }
            if (rd.require("$EndNodes").rfind("$EndNodes", 0) != 0)
                rd.fail("expected $EndNodes");
        } else if (line.rfind("$Elements", 0) == 0) {
            saw_elements = true;
            long n;
            {
                std::istringstream ss(rd.require("element count"));
                if (!(ss >> n) || n < 0) rd.fail("expected element count");
            }
            std::map<int, int> skipped;
            for (long i = 0; i < n; ++i) {
                std::istringstream ss(rd.require("element line"));
                long id;
                int type, ntags;
                if (!(ss >> id >> type >> ntags))
                    rd.fail("expected 'id type ntags ...' element line");
                long tag;
                for (int t = 0; t < ntags; ++t)
                    if (!(ss >> tag)) rd.fail("missing element tags");
                int nn = type == 2 ? 3 : type == 3 ? 4 : 0;
                if (nn == 0) {
                    ++skipped[type];
                    continue;
                }
                std::vector<long> conn(static_cast<size_t>(nn));
                for (int k = 0; k < nn; ++k)
                    if (!(ss >> conn[size_t(k)]))
                        rd.fail("missing element connectivity");
                raw_cells.push_back(std::move(conn));
            }
            for (auto [type, count] : skipped)
                warn(path + ": ignored " + std::to_string(count) +
                     " element(s) of unsupported type " + std::to_string(type));
            if (rd.require("$EndElements").rfind("$EndElements", 0) != 0)
                rd.fail("expected $EndElements");
        } else if (line[0] == '$') {
            // skip unknown section
            std::string endtag = "$End" + line.substr(1);
            // tolerate trailing markers like \r
            endtag = endtag.substr(0, endtag.find_first_of(" \t\r"));
            std::string l;
            while (rd.next(l))
                if (l.rfind(endtag, 0) == 0) break;
        }
    }
    if (!saw_nodes || !saw_elements)
        throw parse_error(path, rd.lineno(), "missing $Nodes or $Elements section");
    if (raw_cells.empty())
        throw parse_error(path, rd.lineno(), "no triangle or quadrangle elements found");

    // compact to the nodes actually used, preserving node order
    std::vector<int> used(nodes.size(), -1);
    std::vector<vec2> vertices;
    std::vector<std::vector<int>> cells;
    cells.reserve(raw_cells.size());
    for (const auto& conn : raw_cells) {
        std::vector<int> loop;
        loop.reserve(conn.size());
        for (long id : conn) {
            auto it = node_id_map.find(id);
            if (it == node_id_map.end())
                throw parse_error(path, 0, "element references unknown node " + std::to_string(id));
            int v = it->second;
            if (used[size_t(v)] < 0) {
                used[size_t(v)] = int(vertices.size());
                vertices.push_back(nodes[size_t(v)]);
            }
            loop.push_back(used[size_t(v)]);
        }
        cells.push_back(std::move(loop));
    }
    return build_mesh(std::move(vertices), std::move(cells));
}

inline poly_mesh import_msh(const std::string& path, std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open mesh file: " + path);
    return import_msh(in, path, warnings);
}

/* Dispatch by extension: .msh -> gmsh reader, everything else native. */
inline poly_mesh load_mesh(const std::string& path, std::vector<std::string>* warnings = nullptr) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".msh") == 0)
        return import_msh(path, warnings);
    return read_native(path);
}

} // namespace prdg
