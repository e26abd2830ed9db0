#pragma once

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <cmath>
#include <string>
#include <vector>

#include "prdg/assembly.hpp"
#include "prdg/errors.hpp"
#include "prdg/mesh.hpp"
#include "prdg/problems.hpp"
#include "prdg/recon.hpp"

namespace prdg {

struct solve_report {
    Eigen::VectorXd x;
    std::string solver; // direct-cholesky | cg
    int iterations = 0;
    double residual = 0.0;
};

constexpr double solver_residual_bound = 1e-9;

/* Direct sparse Cholesky; diagonally preconditioned CG above the size
 * threshold. Residual invariant ||Ax-b||/||b|| < 1e-9 enforced. */
inline solve_report solve(const discrete_system& sys, Eigen::Index direct_limit = 150000) {
    solve_report rep;
    const Eigen::Index n = sys.A.rows();
    if (sys.b.norm() == 0.0) {
        rep.x = Eigen::VectorXd::Zero(n);
        rep.solver = "direct-cholesky";
        return rep;
    }

    if (n <= direct_limit) {
        Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.A);
        if (llt.info() != Eigen::Success)
            throw factorization_error(
                "sparse Cholesky factorization failed (matrix not positive definite); "
                "increase the penalty parameters mu, eta");
        rep.x = llt.solve(sys.b);
        // two steps of iterative refinement; the condition number grows like
        // h^-4 so a plain solve can sit right at the residual bound
        for (int it = 0; it < 2; ++it)
            rep.x += llt.solve(sys.b - sys.A * rep.x);
        rep.solver = "direct-cholesky";
    } else {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(1e-12);
        cg.setMaxIterations(10 * n);
        cg.compute(sys.A);
        rep.x = cg.solve(sys.b);
        rep.iterations = int(cg.iterations());
        rep.solver = "cg";
    }

    rep.residual = (sys.A * rep.x - sys.b).norm() / sys.b.norm();
    if (!(rep.residual < solver_residual_bound))
        throw error(error_kind::numeric, "solver residual " + std::to_string(rep.residual) +
                                             " exceeds 1e-9; system too ill-conditioned");
    return rep;
}

struct error_report {
    double l2 = 0.0;
    double energy = 0.0;
    double energy_vol = 0.0;   // broken Laplacian component
    double energy_jump0 = 0.0; // h^-3 weighted u-jumps
    double energy_jump1 = 0.0; // h^-1 weighted grad-jumps
    double h2broken = 0.0;
    size_t dofs = 0;
    double h = 0.0;
};

/* Error norms of u - v for a piecewise polynomial v; boundary faces
 * contribute one-sided jumps against the exact traces. Quadrature degree
 * 2m + 4 suppresses bias from the non-polynomial u. */
inline error_report compute_errors(const poly_mesh& mesh, const cell_poly_field& v,
                                   const manufactured_case& cse, size_t dofs) {
    const int m = v.bases.empty() ? 0 : v.bases[0].degree();
    const int qdeg = 2 * m + 4;
    error_report rep;
    rep.dofs = dofs;
    rep.h = mesh.max_diameter();

    double l2 = 0.0, vol = 0.0, h2 = 0.0;
    for (size_t c = 0; c < mesh.num_cells(); ++c) {
        mapped_quad q = cell_quadrature(mesh, int(c), qdeg);
        for (size_t k = 0; k < q.points.size(); ++k) {
            const vec2 p = q.points[k];
            const double w = q.weights[k];
            const double de = cse.u(p) - v.value(int(c), p);
            l2 += w * de * de;

            const auto hu = cse.hess(p);
            const double exx = hu[0] - v.value(int(c), p, 2, 0);
            const double exy = hu[1] - v.value(int(c), p, 1, 1);
            const double eyy = hu[2] - v.value(int(c), p, 0, 2);
            h2 += w * (exx * exx + 2.0 * exy * exy + eyy * eyy);

            const double dl = cse.lap(p) - (v.value(int(c), p, 2, 0) + v.value(int(c), p, 0, 2));
            vol += w * dl * dl;
        }
    }

    double jump0 = 0.0, jump1 = 0.0;
    for (size_t fidx = 0; fidx < mesh.num_faces(); ++fidx) {
        const mesh_face& f = mesh.faces[fidx];
        const vec2 n = f.normal;
        const double w3 = 1.0 / (f.length * f.length * f.length);
        const double w1 = 1.0 / f.length;
        mapped_quad q = face_quadrature(mesh, int(fidx), qdeg);
        for (size_t k = 0; k < q.points.size(); ++k) {
            const vec2 p = q.points[k];
            const double w = q.weights[k];
            double j0, j1;
            if (f.is_boundary()) {
                j0 = cse.u(p) - v.value(f.left, p);
                const vec2 gu = cse.grad(p);
                j1 = n.x * (gu.x - v.value(f.left, p, 1, 0)) +
                     n.y * (gu.y - v.value(f.left, p, 0, 1));
            } else {
                j0 = v.value(f.right, p) - v.value(f.left, p);
                j1 = n.x * (v.value(f.right, p, 1, 0) - v.value(f.left, p, 1, 0)) +
                     n.y * (v.value(f.right, p, 0, 1) - v.value(f.left, p, 0, 1));
            }
            jump0 += w * w3 * j0 * j0;
            jump1 += w * w1 * j1 * j1;
        }
    }

    rep.l2 = std::sqrt(l2);
    rep.energy_vol = std::sqrt(vol);
    rep.energy_jump0 = std::sqrt(jump0);
    rep.energy_jump1 = std::sqrt(jump1);
    rep.energy = std::sqrt(vol + jump0 + jump1);
    rep.h2broken = std::sqrt(h2);
    return rep;
}

struct rate_entry {
    enum class tag { none, value, exact } kind = tag::none;
    double value = 0.0;
};

/* Pairwise rates log(e_c/e_f)/log(h_c/h_f); zero error reported as exact. */
inline std::vector<rate_entry> pairwise_rates(const std::vector<double>& h,
                                              const std::vector<double>& e) {
    if (h.size() != e.size())
        throw config_error("pairwise_rates: size mismatch");
    std::vector<rate_entry> rates(h.size());
    for (size_t i = 1; i < h.size(); ++i) {
        if (!(h[i] < h[i - 1]))
            throw config_error("pairwise_rates: h must be strictly decreasing");
        if (e[i] == 0.0 || e[i - 1] == 0.0) {
            rates[i].kind = rate_entry::tag::exact;
            continue;
        }
        rates[i].kind = rate_entry::tag::value;
        rates[i].value = std::log(e[i - 1] / e[i]) / std::log(h[i - 1] / h[i]);
    }
    return rates;
}

} // namespace prdg
