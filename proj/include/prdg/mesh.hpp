#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "prdg/errors.hpp"
#include "prdg/geometry.hpp"
#include "prdg/quadrature.hpp"

namespace prdg {

/* Oriented face between two cells. Endpoints are stored in the traversal
 * order of the left cell, so the unit normal (rotated edge vector) points
 * from the left cell into the right one, and outward on the boundary. */
struct mesh_face {
    static constexpr int BOUNDARY = -1;

    int v0 = 0, v1 = 0;
    int left = -1;
    int right = BOUNDARY;
    double length = 0.0;
    vec2 normal;

    bool is_boundary() const { return right == BOUNDARY; }
};

enum class side_tag { left, right };

/* One side of a face; right is only meaningful on interior faces. */
struct face_side {
    int face = -1;
    side_tag side = side_tag::left;
};

struct cell_geometry {
    vec2 barycenter;
    double diameter = 0.0;
    double area = 0.0;
    std::vector<triangle> subtris;
};

class poly_mesh {
public:
    std::vector<vec2> vertices;
    std::vector<std::vector<int>> cells; // CCW vertex loops
    std::vector<mesh_face> faces;
    std::vector<cell_geometry> geom;
    std::vector<std::vector<int>> cell_faces; // face ids per cell
    std::vector<std::vector<int>> neighbors;  // face-adjacent cells, ascending

    int num_vertices() const { return int(vertices.size()); }
    int num_cells() const { return int(cells.size()); }
    int num_faces() const { return int(faces.size()); }

    const vec2& barycenter(int c) const { return geom[c].barycenter; }
    double diameter(int c) const { return geom[c].diameter; }
    double area(int c) const { return geom[c].area; }

    std::vector<vec2> cell_points(int c) const {
        std::vector<vec2> pts;
        pts.reserve(cells[c].size());
        for (int v : cells[c]) pts.push_back(vertices[v]);
        return pts;
    }

    int cell_of(const face_side& fs) const {
        const mesh_face& f = faces[fs.face];
        return fs.side == side_tag::left ? f.left : f.right;
    }

    /* Outward unit normal of the face as seen from the given side. */
    vec2 outward_normal(const face_side& fs) const {
        const vec2& n = faces[fs.face].normal;
        return fs.side == side_tag::left ? n : vec2{-n.x, -n.y};
    }

    double max_diameter() const {
        double h = 0.0;
        for (const auto& g : geom) h = std::max(h, g.diameter);
        return h;
    }

    double total_area() const {
        double a = 0.0;
        for (const auto& g : geom) a += g.area;
        return a;
    }

    /* Shape-regularity of the sub-decomposition: max over sub-triangles of
     * diameter / inradius. */
    double shape_regularity() const {
        double sigma = 0.0;
        for (const auto& g : geom)
            for (const auto& t : g.subtris)
                sigma = std::max(sigma, t.diameter() / t.inradius());
        return sigma;
    }
};

/* Fan/ear-clip triangulation of a simple CCW polygon. Triangles covering the
 * polygon exactly; degenerate slivers from collinear vertices are dropped. */
inline std::vector<triangle> subtriangulate(const std::vector<vec2>& pts) {
    size_t n = pts.size();
    if (n < 3) throw topology_error("subtriangulate: polygon with fewer than 3 vertices");
    if (!polygon_is_simple(pts))
        throw topology_error("subtriangulate: self-intersecting polygon");

    double scale = polygon_diameter(pts);
    double area_tol = 1e-14 * scale * scale;
    std::vector<triangle> tris;

    auto push = [&](const vec2& a, const vec2& b, const vec2& c) {
        triangle t{{a, b, c}};
        if (t.area() > area_tol) tris.push_back(t);
    };

    if (n == 3) {
        push(pts[0], pts[1], pts[2]);
        return tris;
    }
    if (n == 4 && polygon_is_convex(pts)) {
        // split along the shorter diagonal
        if ((pts[2] - pts[0]).squared_norm() <= (pts[3] - pts[1]).squared_norm()) {
            push(pts[0], pts[1], pts[2]);
            push(pts[0], pts[2], pts[3]);
        } else {
            push(pts[0], pts[1], pts[3]);
            push(pts[1], pts[2], pts[3]);
        }
        return tris;
    }
    if (polygon_is_convex(pts)) {
        vec2 bc = polygon_barycenter(pts);
        for (size_t i = 0; i < n; ++i)
            push(bc, pts[i], pts[(i + 1) % n]);
        return tris;
    }

    // ear clipping
    std::vector<vec2> poly(pts.begin(), pts.end());
    while (poly.size() > 3) {
        size_t m = poly.size();
        bool clipped = false;
        for (size_t i = 0; i < m; ++i) {
            const vec2& prev = poly[(i + m - 1) % m];
            const vec2& cur = poly[i];
            const vec2& next = poly[(i + 1) % m];
            double turn = cross(cur - prev, next - cur);
            if (turn < -area_tol) continue; // reflex corner
            bool ear = true;
            for (size_t j = 0; j < m && ear; ++j) {
                if (j == i || j == (i + m - 1) % m || j == (i + 1) % m) continue;
                if (turn > area_tol && point_in_triangle(poly[j], prev, cur, next))
                    ear = false;
            }
            if (!ear) continue;
            push(prev, cur, next);
            poly.erase(poly.begin() + long(i));
            clipped = true;
            break;
        }
        if (!clipped)
            throw topology_error("subtriangulate: no ear found (degenerate polygon)");
    }
    push(poly[0], poly[1], poly[2]);
    return tris;
}

/* Assemble a poly_mesh from raw vertices and CCW cell loops; computes faces,
 * adjacency and per-cell geometric caches, and verifies conformity. */
inline poly_mesh build_mesh(std::vector<vec2> vertices, std::vector<std::vector<int>> cells) {
    poly_mesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.cells = std::move(cells);

    const int nv = mesh.num_vertices();
    for (size_t c = 0; c < mesh.cells.size(); ++c) {
        auto& loop = mesh.cells[c];
        if (loop.size() < 3)
            throw topology_error("cell " + std::to_string(c) + " has fewer than 3 vertices");
        for (int v : loop)
            if (v < 0 || v >= nv)
                throw topology_error("cell " + std::to_string(c) + " references vertex " +
                                     std::to_string(v) + " out of range");
        std::vector<vec2> pts;
        pts.reserve(loop.size());
        for (int v : loop) pts.push_back(mesh.vertices[v]);
        double a = polygon_signed_area(pts);
        if (a < 0.0) { // normalize to CCW
            std::reverse(loop.begin(), loop.end());
            a = -a;
        }
        if (a <= 0.0)
            throw topology_error("cell " + std::to_string(c) + " has zero area");
    }

    // face table; second referencing cell must traverse the edge backwards
    std::map<std::pair<int, int>, int> edge_to_face;
    mesh.cell_faces.resize(mesh.cells.size());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& loop = mesh.cells[size_t(c)];
        size_t k = loop.size();
        for (size_t i = 0; i < k; ++i) {
            int a = loop[i], b = loop[(i + 1) % k];
            if (a == b)
                throw topology_error("cell " + std::to_string(c) + " has a zero-length edge");
            auto key = std::minmax(a, b);
            auto it = edge_to_face.find(key);
            if (it == edge_to_face.end()) {
                mesh_face f;
                f.v0 = a;
                f.v1 = b;
                f.left = c;
                mesh.faces.push_back(f);
                edge_to_face.emplace(key, mesh.num_faces() - 1);
                mesh.cell_faces[size_t(c)].push_back(mesh.num_faces() - 1);
            } else {
                mesh_face& f = mesh.faces[size_t(it->second)];
                if (!f.is_boundary())
                    throw topology_error("face (" + std::to_string(key.first) + "," +
                                         std::to_string(key.second) +
                                         ") referenced by more than two cells");
                if (f.v0 != b || f.v1 != a)
                    throw topology_error("face (" + std::to_string(key.first) + "," +
                                         std::to_string(key.second) +
                                         ") traversed twice in the same direction "
                                         "(duplicated or inverted cell)");
                f.right = c;
                mesh.cell_faces[size_t(c)].push_back(it->second);
            }
        }
    }

    for (auto& f : mesh.faces) {
        vec2 d = mesh.vertices[size_t(f.v1)] - mesh.vertices[size_t(f.v0)];
        f.length = d.norm();
        f.normal = vec2{d.y, -d.x} / f.length;
    }

    mesh.geom.resize(mesh.cells.size());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        auto pts = mesh.cell_points(c);
        auto& g = mesh.geom[size_t(c)];
        g.area = polygon_signed_area(pts);
        g.barycenter = polygon_barycenter(pts);
        g.diameter = polygon_diameter(pts);
        g.subtris = subtriangulate(pts);
    }

    mesh.neighbors.resize(mesh.cells.size());
    for (const auto& f : mesh.faces) {
        if (f.is_boundary()) continue;
        mesh.neighbors[size_t(f.left)].push_back(f.right);
        mesh.neighbors[size_t(f.right)].push_back(f.left);
    }
    for (auto& nbrs : mesh.neighbors)
        std::sort(nbrs.begin(), nbrs.end());

    return mesh;
}

struct rect_domain {
    vec2 lo{0.0, 0.0};
    vec2 hi{1.0, 1.0};
};

/* Uniform triangular mesh: n x n squares, each split along the same diagonal.
 * 2n^2 cells. */
inline poly_mesh generate_structured_tri(int n, const rect_domain& domain = {}) {
    if (n < 1) throw config_error("generate_structured_tri: n must be >= 1");
    std::vector<vec2> verts;
    verts.reserve(size_t(n + 1) * size_t(n + 1));
    double dx = (domain.hi.x - domain.lo.x) / n;
    double dy = (domain.hi.y - domain.lo.y) / n;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            verts.emplace_back(domain.lo.x + i * dx, domain.lo.y + j * dy);

    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<std::vector<int>> cells;
    cells.reserve(2 * size_t(n) * size_t(n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    return build_mesh(std::move(verts), std::move(cells));
}

/* Uniform triangular mesh of the L-shaped domain (-1,1)^2 minus the closed
 * quadrant [0,1)x(-1,0], reentrant corner at the origin. 6n^2 cells. */
inline poly_mesh generate_lshape_tri(int n) {
    if (n < 1) throw config_error("generate_lshape_tri: n must be >= 1");
    int g = 2 * n; // grid cells per axis over (-1,1)^2
    double h = 1.0 / n;

    std::vector<vec2> verts;
    std::vector<int> vmap(size_t(g + 1) * size_t(g + 1), -1);
    auto grid_id = [g](int i, int j) { return j * (g + 1) + i; };
    auto vertex_of = [&](int i, int j) {
        int& id = vmap[size_t(grid_id(i, j))];
        if (id < 0) {
            id = int(verts.size());
            verts.emplace_back(-1.0 + i * h, -1.0 + j * h);
        }
        return id;
    };

    std::vector<std::vector<int>> cells;
    cells.reserve(6 * size_t(n) * size_t(n));
    for (int j = 0; j < g; ++j) {
        for (int i = 0; i < g; ++i) {
            bool removed = (i >= n) && (j < n); // square center in [0,1)x(-1,0)
            if (removed) continue;
            int v00 = vertex_of(i, j), v10 = vertex_of(i + 1, j);
            int v11 = vertex_of(i + 1, j + 1), v01 = vertex_of(i, j + 1);
            cells.push_back({v00, v10, v11});
            cells.push_back({v00, v11, v01});
        }
    }
    return build_mesh(std::move(verts), std::move(cells));
}

/* Volume quadrature over a polygonal cell via its sub-triangulation;
 * integrates polynomials exactly up to `degree`. */
inline mapped_quad cell_quadrature(const poly_mesh& mesh, int cell, int degree) {
    triangle_rule_t rule = triangle_rule(degree);
    mapped_quad out;
    for (const triangle& t : mesh.geom[size_t(cell)].subtris)
        map_triangle_rule(rule, t, out);
    return out;
}

inline mapped_quad face_quadrature(const poly_mesh& mesh, int face, int degree) {
    const mesh_face& f = mesh.faces[size_t(face)];
    return segment_quadrature(mesh.vertices[size_t(f.v0)], mesh.vertices[size_t(f.v1)], degree);
}

} // namespace prdg
