#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "prdg/errors.hpp"
#include "prdg/mesh.hpp"

namespace prdg {

/* Element patch S(K): owner first, then neighbor rings in the order they
 * were grown; within a ring, ascending cell index. */
struct patch {
    int owner = -1;
    std::vector<int> members;
    std::vector<vec2> collocation; // members' barycenters, same order

    size_t size() const { return members.size(); }
    bool contains(int cell) const {
        return std::find(members.begin(), members.end(), cell) != members.end();
    }
};

inline int pm_dimension(int m) { return (m + 1) * (m + 2) / 2; }

enum class patch_profile { example1, example2, example3, custom };

inline patch_profile parse_patch_profile(const std::string& name) {
    if (name == "example1") return patch_profile::example1;
    if (name == "example2") return patch_profile::example2;
    if (name == "example3") return patch_profile::example3;
    if (name == "custom") return patch_profile::custom;
    throw config_error("unknown patch profile: " + name);
}

/* Uniform #S(K) per degree, m = 2..6. */
inline int patch_size_for_degree(int m, patch_profile profile, int custom_size = 0) {
    if (profile == patch_profile::custom) {
        if (custom_size < pm_dimension(m))
            throw config_error("patch size " + std::to_string(custom_size) +
                               " is below dim P_m = " + std::to_string(pm_dimension(m)) +
                               " for m = " + std::to_string(m));
        return custom_size;
    }
    if (m < 2 || m > 6)
        throw config_error("built-in patch profiles cover m = 2..6, got m = " +
                           std::to_string(m));
    static constexpr int table[3][5] = {
        {9, 15, 22, 29, 38},
        {9, 16, 23, 32, 45},
        {9, 20, 28, 38, 49},
    };
    int row = profile == patch_profile::example1 ? 0 : profile == patch_profile::example2 ? 1 : 2;
    return table[row][m - 2];
}

/* Grow S(K) by whole Von Neumann rings until the count first reaches
 * `target`; the ring that crosses the threshold is trimmed to land exactly
 * on `target`, keeping the cells closest to x_K (ties by cell index).
 * Earlier rings stay whole, so the patch is always face-connected. */
inline patch build_patch(const poly_mesh& mesh, int owner, int target) {
    if (target < 1)
        throw config_error("patch target size must be >= 1");
    if (owner < 0 || owner >= int(mesh.num_cells()))
        throw config_error("patch owner cell out of range");
    if (size_t(target) > mesh.num_cells())
        throw config_error("patch target " + std::to_string(target) +
                           " exceeds mesh cell count " + std::to_string(mesh.num_cells()));

    const vec2 xk = mesh.barycenter(owner);
    std::vector<char> in_patch(mesh.num_cells(), 0);
    in_patch[size_t(owner)] = 1;

    patch p;
    p.owner = owner;
    p.members.push_back(owner);

    std::vector<int> ring{owner};
    while (p.members.size() < size_t(target)) {
        std::vector<int> next;
        for (int c : ring)
            for (int nb : mesh.neighbors[size_t(c)])
                if (!in_patch[size_t(nb)]) {
                    in_patch[size_t(nb)] = 1;
                    next.push_back(nb);
                }
        if (next.empty())
            throw config_error("mesh exhausted before reaching patch target " +
                               std::to_string(target) + " for cell " + std::to_string(owner));
        std::sort(next.begin(), next.end());

        size_t missing = size_t(target) - p.members.size();
        if (next.size() > missing) {
            std::vector<int> order = next;
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                double da = (mesh.barycenter(a) - xk).squared_norm();
                double db = (mesh.barycenter(b) - xk).squared_norm();
                if (da != db) return da < db;
                return a < b;
            });
            order.resize(missing);
            std::sort(order.begin(), order.end());
            next = std::move(order);
        }
        p.members.insert(p.members.end(), next.begin(), next.end());
        ring = std::move(next);
    }

    p.collocation.reserve(p.members.size());
    for (int c : p.members)
        p.collocation.push_back(mesh.barycenter(c));
    return p;
}

inline std::vector<patch> build_all_patches(const poly_mesh& mesh, int target) {
    std::vector<patch> patches;
    patches.reserve(mesh.num_cells());
    for (size_t c = 0; c < mesh.num_cells(); ++c)
        patches.push_back(build_patch(mesh, int(c), target));
    return patches;
}

} // namespace prdg
