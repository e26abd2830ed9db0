#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "prdg/basis.hpp"
#include "prdg/errors.hpp"
#include "prdg/mesh.hpp"
#include "prdg/patch.hpp"
#include "prdg/quadrature.hpp"

namespace prdg {

constexpr double rank_tolerance = 1e-10;

namespace detail {

inline Eigen::MatrixXd design_matrix(const local_basis& basis, const std::vector<vec2>& points) {
    Eigen::MatrixXd A(points.size(), basis.dimension());
    std::vector<double> row(size_t(basis.dimension()));
    for (size_t i = 0; i < points.size(); ++i) {
        basis.eval(points[i], 0, 0, row.data());
        for (int j = 0; j < basis.dimension(); ++j)
            A(Eigen::Index(i), j) = row[size_t(j)];
    }
    return A;
}

} // namespace detail

/* Pseudo-inverse of the design matrix via SVD; equals (A^T A)^-1 A^T when A
 * has full column rank. Also reports the extreme singular values. */
inline Eigen::MatrixXd ls_pseudo_inverse(const Eigen::MatrixXd& A, double& sigma_min,
                                         double& sigma_max) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    sigma_max = sv.size() ? sv(0) : 0.0;
    sigma_min = sv.size() ? sv(sv.size() - 1) : 0.0;
    if (!(sigma_min > rank_tolerance * sigma_max))
        return Eigen::MatrixXd(); // caller reports the offending cell
    Eigen::VectorXd inv = sv.cwiseInverse();
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/* Least-squares fit of samples at `points` by a polynomial in `basis`. */
inline Eigen::VectorXd fit_local(const local_basis& basis, const std::vector<vec2>& points,
                                 const Eigen::VectorXd& samples, int cell = -1) {
    if (Eigen::Index(points.size()) != samples.size())
        throw config_error("fit_local: points/samples size mismatch");
    if (int(points.size()) < basis.dimension())
        throw uniqueness_violation(cell, "fewer collocation points than dim P_m");
    Eigen::MatrixXd A = detail::design_matrix(basis, points);
    double smin, smax;
    Eigen::MatrixXd Minv = ls_pseudo_inverse(A, smin, smax);
    if (Minv.size() == 0)
        throw uniqueness_violation(cell, "rank-deficient least-squares fit (sigma_min/sigma_max = " +
                                             std::to_string(smin / (smax > 0 ? smax : 1.0)) + ")");
    return Minv * samples;
}

/* Reconstruction operator R: per cell the coefficient map M_K from patch DOF
 * samples to local polynomial coefficients, lambda_K = R e_K. */
class recon_operator {
public:
    int degree() const { return m_; }
    size_t num_cells() const { return patches_.size(); }
    const patch& cell_patch(int cell) const { return patches_[size_t(cell)]; }
    const local_basis& cell_basis(int cell) const { return bases_[size_t(cell)]; }
    const Eigen::MatrixXd& coefficient_map(int cell) const { return maps_[size_t(cell)]; }
    double sigma_min(int cell) const { return sigma_min_[size_t(cell)]; }
    double sigma_max(int cell) const { return sigma_max_[size_t(cell)]; }

    /* Coefficients of (R g)|_K from the global per-cell DOF vector. */
    Eigen::VectorXd local_coeffs(int cell, const Eigen::VectorXd& dofs) const {
        const patch& p = patches_[size_t(cell)];
        Eigen::VectorXd samples(p.members.size());
        for (size_t i = 0; i < p.members.size(); ++i)
            samples(Eigen::Index(i)) = dofs(p.members[i]);
        return maps_[size_t(cell)] * samples;
    }

    /* d^(dx,dy) lambda_{K'}(point) for the DOFs K' active on `cell`, i.e. the
     * members of S(cell); values aligned with cell_patch(cell).members. */
    void eval_basis(int cell, vec2 point, int dx, int dy, double* values) const {
        if (dx < 0 || dy < 0 || dx + dy > 3)
            throw config_error("basis derivative order must be between 0 and 3");
        const local_basis& basis = bases_[size_t(cell)];
        const Eigen::MatrixXd& M = maps_[size_t(cell)];
        std::vector<double> b(size_t(basis.dimension()));
        basis.eval(point, dx, dy, b.data());
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < M.rows(); ++i)
                s += b[size_t(i)] * M(i, j);
            values[j] = s;
        }
    }

    std::vector<double> eval_basis(int cell, vec2 point, int dx = 0, int dy = 0) const {
        std::vector<double> values(patches_[size_t(cell)].size());
        eval_basis(cell, point, dx, dy, values.data());
        return values;
    }

    friend recon_operator build_recon(const poly_mesh& mesh, std::vector<patch> patches, int m);

private:
    int m_ = 0;
    std::vector<patch> patches_;
    std::vector<local_basis> bases_;
    std::vector<Eigen::MatrixXd> maps_;
    std::vector<double> sigma_min_, sigma_max_;
};

inline recon_operator build_recon(const poly_mesh& mesh, std::vector<patch> patches, int m) {
    if (patches.size() != mesh.num_cells())
        throw config_error("build_recon: one patch per cell required");
    recon_operator op;
    op.m_ = m;
    op.patches_ = std::move(patches);
    op.bases_.reserve(mesh.num_cells());
    op.maps_.resize(mesh.num_cells());
    op.sigma_min_.resize(mesh.num_cells());
    op.sigma_max_.resize(mesh.num_cells());
    for (size_t c = 0; c < mesh.num_cells(); ++c) {
        const patch& p = op.patches_[c];
        if (int(p.size()) < pm_dimension(m))
            throw uniqueness_violation(int(c), "patch smaller than dim P_m");
        op.bases_.emplace_back(m, mesh.barycenter(int(c)), mesh.diameter(int(c)));
        Eigen::MatrixXd A = detail::design_matrix(op.bases_[c], p.collocation);
        op.maps_[c] = ls_pseudo_inverse(A, op.sigma_min_[c], op.sigma_max_[c]);
        if (op.maps_[c].size() == 0)
            throw uniqueness_violation(int(c),
                                       "collocation points do not determine a unique degree-" +
                                           std::to_string(m) + " polynomial");
    }
    return op;
}

inline recon_operator build_recon(const poly_mesh& mesh, int m, int patch_target) {
    return build_recon(mesh, build_all_patches(mesh, patch_target), m);
}

/* Stability constant Lambda(m, I_K): ratio of a fitted polynomial's sup over
 * S(K) to its sup over I_K. The sup over S(K) is sampled at quadrature nodes
 * and polygon vertices of the patch cells; the max over the sample unit ball
 * is then the max absolute row sum of E_Y M_K (the inf-to-inf operator norm,
 * computed exactly). A sampled sup makes each estimate a lower bound of the
 * true Lambda; constants are reproduced exactly, so every estimate is >= 1. */
struct lambda_report {
    std::vector<double> per_cell;
    double max = 0.0;
    int argmax = -1;
};

inline lambda_report estimate_lambda(const recon_operator& op, const poly_mesh& mesh) {
    lambda_report rep;
    rep.per_cell.resize(op.num_cells(), 0.0);
    const int qdeg = std::max(1, 2 * op.degree());
    for (size_t c = 0; c < op.num_cells(); ++c) {
        const patch& p = op.cell_patch(int(c));
        const local_basis& basis = op.cell_basis(int(c));
        const Eigen::MatrixXd& M = op.coefficient_map(int(c));

        std::vector<vec2> samples;
        for (int member : p.members) {
            mapped_quad q = cell_quadrature(mesh, member, qdeg);
            samples.insert(samples.end(), q.points.begin(), q.points.end());
            for (vec2 v : mesh.cell_points(member))
                samples.push_back(v);
        }

        double lam = 0.0;
        std::vector<double> b(size_t(basis.dimension()));
        for (const vec2& y : samples) {
            basis.eval(y, 0, 0, b.data());
            double row_sum = 0.0;
            for (Eigen::Index j = 0; j < M.cols(); ++j) {
                double g = 0.0;
                for (Eigen::Index i = 0; i < M.rows(); ++i)
                    g += b[size_t(i)] * M(i, j);
                row_sum += std::abs(g);
            }
            lam = std::max(lam, row_sum);
        }
        rep.per_cell[c] = lam;
        if (lam > rep.max) {
            rep.max = lam;
            rep.argmax = int(c);
        }
    }
    return rep;
}

/* Piecewise polynomial field: one coefficient vector per cell in that cell's
 * local basis. Uniform representation for both solver modes. */
struct cell_poly_field {
    std::vector<local_basis> bases;
    std::vector<Eigen::VectorXd> coeffs;

    double value(int cell, vec2 p, int dx = 0, int dy = 0) const {
        return bases[size_t(cell)].value(coeffs[size_t(cell)].data(), p, dx, dy);
    }
};

inline cell_poly_field reconstruct_field(const recon_operator& op, const Eigen::VectorXd& dofs) {
    cell_poly_field f;
    f.bases.reserve(op.num_cells());
    f.coeffs.reserve(op.num_cells());
    for (size_t c = 0; c < op.num_cells(); ++c) {
        f.bases.push_back(op.cell_basis(int(c)));
        f.coeffs.push_back(op.local_coeffs(int(c), dofs));
    }
    return f;
}

} // namespace prdg
