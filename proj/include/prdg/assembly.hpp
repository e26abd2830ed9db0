#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "prdg/errors.hpp"
#include "prdg/mesh.hpp"
#include "prdg/problems.hpp"
#include "prdg/quadrature.hpp"
#include "prdg/recon.hpp"

namespace prdg {

/* Face penalties alpha = mu / h_e^3 and beta = eta / h_e. */
struct penalty_config {
    double mu = 0.0;
    double eta = 0.0;

    static penalty_config defaults_for(int m) {
        double m2 = double(m) * m;
        return {5.0 * m2 * m2, 5.0 * m2};
    }
    double alpha(double h_e) const { return mu / (h_e * h_e * h_e); }
    double beta(double h_e) const { return eta / h_e; }
    void validate() const {
        if (!(mu > 0.0) || !(eta > 0.0))
            throw config_error("penalty parameters mu, eta must be positive");
    }
};

enum class assembly_mode { reconstructed, baseline_full_dg };

inline std::string to_string(assembly_mode m) {
    return m == assembly_mode::reconstructed ? "reconstructed" : "baseline-full-dg";
}

struct discrete_system {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    assembly_mode mode = assembly_mode::reconstructed;
    bc_mode bc = bc_mode::clamped;
    int m = 0;
    int dofs_per_cell = 1; // 1, or dim P_m in baseline mode
    size_t num_cells = 0;

    Eigen::Index num_dofs() const { return A.rows(); }
    int dof_index(int cell, int local = 0) const { return cell * dofs_per_cell + local; }
};

namespace detail {

/* DOF-space backends share this shape: active(cell) lists the global DOFs
 * whose basis functions are nonzero on the cell, eval fills their
 * derivative values at a point. */
class recon_space {
public:
    explicit recon_space(const recon_operator& op) : op_(op) {}
    Eigen::Index n_dofs() const { return Eigen::Index(op_.num_cells()); }
    const std::vector<int>& active(int cell) const { return op_.cell_patch(cell).members; }
    void eval(int cell, vec2 p, int dx, int dy, double* out) const {
        op_.eval_basis(cell, p, dx, dy, out);
    }

private:
    const recon_operator& op_;
};

class baseline_space {
public:
    baseline_space(const poly_mesh& mesh, int m) : dim_(pm_dimension(m)) {
        bases_.reserve(mesh.num_cells());
        active_.resize(mesh.num_cells());
        for (size_t c = 0; c < mesh.num_cells(); ++c) {
            bases_.emplace_back(m, mesh.barycenter(int(c)), mesh.diameter(int(c)));
            active_[c].resize(size_t(dim_));
            for (int j = 0; j < dim_; ++j)
                active_[c][size_t(j)] = int(c) * dim_ + j;
        }
    }
    Eigen::Index n_dofs() const { return Eigen::Index(bases_.size()) * dim_; }
    const std::vector<int>& active(int cell) const { return active_[size_t(cell)]; }
    void eval(int cell, vec2 p, int dx, int dy, double* out) const {
        bases_[size_t(cell)].eval(p, dx, dy, out);
    }
    const local_basis& cell_basis(int cell) const { return bases_[size_t(cell)]; }

private:
    int dim_;
    std::vector<local_basis> bases_;
    std::vector<std::vector<int>> active_;
};

/* Trace data of all DOFs active on one side of a face at one point. */
struct side_trace {
    const std::vector<int>* idx = nullptr;
    std::vector<double> val, gn, lap, gln; // v, n.grad v, lap v, n.grad lap v

    template <class Space>
    void fill(const Space& space, int cell, vec2 p, vec2 n) {
        size_t na = space.active(cell).size();
        idx = &space.active(cell);
        val.resize(na);
        gn.resize(na);
        lap.resize(na);
        gln.resize(na);
        std::vector<double> t1(na), t2(na);

        space.eval(cell, p, 0, 0, val.data());
        space.eval(cell, p, 1, 0, t1.data());
        space.eval(cell, p, 0, 1, t2.data());
        for (size_t i = 0; i < na; ++i)
            gn[i] = n.x * t1[i] + n.y * t2[i];
        space.eval(cell, p, 2, 0, t1.data());
        space.eval(cell, p, 0, 2, t2.data());
        for (size_t i = 0; i < na; ++i)
            lap[i] = t1[i] + t2[i];
        space.eval(cell, p, 3, 0, t1.data());
        space.eval(cell, p, 1, 2, t2.data());
        for (size_t i = 0; i < na; ++i)
            gln[i] = n.x * (t1[i] + t2[i]);
        space.eval(cell, p, 2, 1, t1.data());
        space.eval(cell, p, 0, 3, t2.data());
        for (size_t i = 0; i < na; ++i)
            gln[i] += n.y * (t1[i] + t2[i]);
    }
};

template <class Space>
void assemble_impl(const poly_mesh& mesh, const Space& space, const manufactured_case& cse,
                   const penalty_config& pen, int m, discrete_system& sys) {
    const Eigen::Index n = space.n_dofs();
    sys.b = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trip;
    {
        size_t est = 0;
        for (size_t c = 0; c < mesh.num_cells(); ++c)
            est += space.active(int(c)).size() * space.active(int(c)).size() * 4;
        trip.reserve(est);
    }

    const int q_vol = std::max(1, 2 * m);
    const int q_face = std::max(1, 2 * m);
    const int q_load = 2 * m + 4;

    /* volume: sum_K int lap v lap w, and int f v */
    for (size_t c = 0; c < mesh.num_cells(); ++c) {
        const std::vector<int>& act = space.active(int(c));
        const size_t na = act.size();
        std::vector<double> t1(na), t2(na), lap(na);

        mapped_quad q = cell_quadrature(mesh, int(c), q_vol);
        Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(Eigen::Index(na), Eigen::Index(na));
        for (size_t k = 0; k < q.points.size(); ++k) {
            space.eval(int(c), q.points[k], 2, 0, t1.data());
            space.eval(int(c), q.points[k], 0, 2, t2.data());
            for (size_t i = 0; i < na; ++i)
                lap[i] = t1[i] + t2[i];
            const double w = q.weights[k];
            for (size_t i = 0; i < na; ++i)
                for (size_t j = 0; j < na; ++j)
                    loc(Eigen::Index(i), Eigen::Index(j)) += w * lap[i] * lap[j];
        }
        for (size_t i = 0; i < na; ++i)
            for (size_t j = 0; j < na; ++j)
                trip.emplace_back(act[i], act[j], loc(Eigen::Index(i), Eigen::Index(j)));

        mapped_quad ql = cell_quadrature(mesh, int(c), q_load);
        std::vector<double> v(na);
        for (size_t k = 0; k < ql.points.size(); ++k) {
            space.eval(int(c), ql.points[k], 0, 0, v.data());
            const double wf = ql.weights[k] * cse.f(ql.points[k]);
            for (size_t i = 0; i < na; ++i)
                sys.b(act[i]) += wf * v[i];
        }
    }

    /* faces: coupling and penalty terms; boundary data into the load */
    side_trace L, R;
    for (size_t fidx = 0; fidx < mesh.num_faces(); ++fidx) {
        const mesh_face& f = mesh.faces[fidx];
        const bool interior = !f.is_boundary();
        const double alpha = pen.alpha(f.length);
        const double beta = pen.beta(f.length);
        const vec2 n = f.normal;
        /* Simply-supported boundary faces keep the alpha penalty and the
         * [[v]].{grad lap} coupling; the {lap}[[grad]] couplings and the
         * beta penalty are dropped, and lap u enters the load as natural
         * data. */
        const bool ss_boundary = !interior && sys.bc == bc_mode::simply_supported;

        const size_t nl = space.active(f.left).size();
        const size_t nr = interior ? space.active(f.right).size() : 0;
        const size_t nt = nl + nr;
        std::vector<int> gidx;
        gidx.reserve(nt);
        for (int d : space.active(f.left))
            gidx.push_back(d);
        if (interior)
            for (int d : space.active(f.right))
                gidx.push_back(d);

        /* combined per-DOF factors at one point: J0 = [[v]] along n,
         * Jn = [[grad v]], Lb = {lap v}, Gn = n.{grad lap v} */
        std::vector<double> J0(nt), Jn(nt), Lb(nt), Gn(nt);
        Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(Eigen::Index(nt), Eigen::Index(nt));

        mapped_quad q = face_quadrature(mesh, int(fidx), q_face);
        for (size_t k = 0; k < q.points.size(); ++k) {
            const double w = q.weights[k];
            L.fill(space, f.left, q.points[k], n);
            if (interior)
                R.fill(space, f.right, q.points[k], n);
            const double avg = interior ? 0.5 : 1.0;
            for (size_t i = 0; i < nt; ++i) {
                if (i < nl) {
                    J0[i] = L.val[i];
                    Jn[i] = L.gn[i];
                    Lb[i] = avg * L.lap[i];
                    Gn[i] = avg * L.gln[i];
                } else {
                    J0[i] = -R.val[i - nl];
                    Jn[i] = -R.gn[i - nl];
                    Lb[i] = avg * R.lap[i - nl];
                    Gn[i] = avg * R.gln[i - nl];
                }
            }
            for (size_t i = 0; i < nt; ++i) {
                const double j0i = J0[i], jni = Jn[i], lbi = Lb[i], gni = Gn[i];
                for (size_t j = 0; j < nt; ++j) {
                    double a = j0i * Gn[j] + J0[j] * gni + alpha * j0i * J0[j];
                    if (!ss_boundary)
                        a += -(lbi * Jn[j] + Lb[j] * jni) + beta * jni * Jn[j];
                    loc(Eigen::Index(i), Eigen::Index(j)) += w * a;
                }
            }
        }
        for (size_t i = 0; i < nt; ++i)
            for (size_t j = 0; j < nt; ++j)
                trip.emplace_back(gidx[i], gidx[j], loc(Eigen::Index(i), Eigen::Index(j)));

        if (!interior) {
            mapped_quad qb = face_quadrature(mesh, int(fidx), q_load);
            for (size_t k = 0; k < qb.points.size(); ++k) {
                const double w = qb.weights[k];
                L.fill(space, f.left, qb.points[k], n);
                const double gd = cse.g_dirichlet(qb.points[k]);
                if (sys.bc == bc_mode::clamped) {
                    const double gn = cse.g_neumann(qb.points[k], n);
                    for (size_t i = 0; i < L.idx->size(); ++i)
                        sys.b((*L.idx)[i]) += w * (gd * (L.gln[i] + alpha * L.val[i]) +
                                                   gn * (beta * L.gn[i] - L.lap[i]));
                } else {
                    const double glap = cse.g_laplacian(qb.points[k]);
                    for (size_t i = 0; i < L.idx->size(); ++i)
                        sys.b((*L.idx)[i]) +=
                            w * (gd * (L.gln[i] + alpha * L.val[i]) + glap * L.gn[i]);
                }
            }
        }
    }

    sys.A.resize(n, n);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
}

} // namespace detail

inline discrete_system assemble(const poly_mesh& mesh, const recon_operator& recon,
                                const manufactured_case& cse, penalty_config pen,
                                assembly_mode mode = assembly_mode::reconstructed) {
    pen.validate();
    if (!cse.f || !cse.u)
        throw config_error("case '" + cse.name + "' lacks f or Dirichlet boundary data");
    if (cse.bc == bc_mode::clamped && !cse.grad)
        throw config_error("case '" + cse.name + "' lacks Neumann data for clamped BC");
    if (cse.bc == bc_mode::simply_supported && !cse.lap)
        throw config_error("case '" + cse.name + "' lacks Laplacian data for simply-supported BC");
    discrete_system sys;
    sys.mode = mode;
    sys.bc = cse.bc;
    sys.m = recon.degree();
    sys.num_cells = mesh.num_cells();
    if (mode == assembly_mode::reconstructed) {
        sys.dofs_per_cell = 1;
        detail::recon_space space(recon);
        detail::assemble_impl(mesh, space, cse, pen, recon.degree(), sys);
    } else {
        sys.dofs_per_cell = pm_dimension(recon.degree());
        detail::baseline_space space(mesh, recon.degree());
        detail::assemble_impl(mesh, space, cse, pen, recon.degree(), sys);
    }
    return sys;
}

/* Coefficients of the baseline solution on each cell (identity
 * reconstruction: the DOF block of the cell). */
inline cell_poly_field baseline_field(const poly_mesh& mesh, int m, const Eigen::VectorXd& dofs) {
    detail::baseline_space space(mesh, m);
    const int dim = pm_dimension(m);
    cell_poly_field f;
    f.bases.reserve(mesh.num_cells());
    f.coeffs.reserve(mesh.num_cells());
    for (size_t c = 0; c < mesh.num_cells(); ++c) {
        f.bases.push_back(space.cell_basis(int(c)));
        f.coeffs.push_back(dofs.segment(Eigen::Index(c) * dim, dim));
    }
    return f;
}

struct coercivity_result {
    bool spd = false;        // Cholesky succeeded
    bool converged = false;  // inverse iteration converged
    double lambda_min = 0.0; // smallest-eigenvalue estimate (valid if spd)
    int iterations = 0;
};

/* Smallest eigenvalue of A by inverse power iteration; a failed Cholesky
 * factorization flags the matrix as not positive definite. */
inline coercivity_result coercivity_probe(const discrete_system& sys, double tol = 1e-6,
                                          int max_iter = 500) {
    coercivity_result res;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.A);
    if (llt.info() != Eigen::Success)
        return res;
    res.spd = true;

    const Eigen::Index n = sys.A.rows();
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    double lambda = 0.0;
    for (res.iterations = 1; res.iterations <= max_iter; ++res.iterations) {
        Eigen::VectorXd y = llt.solve(x);
        y.normalize();
        double next = y.dot(sys.A * y);
        if (res.iterations > 1 && std::abs(next - lambda) <= tol * std::abs(next)) {
            lambda = next;
            res.converged = true;
            break;
        }
        lambda = next;
        x = y;
    }
    res.lambda_min = lambda;
    return res;
}

/* Coordinate MatrixMarket dump (debug interface). */
inline void write_matrix_market(std::ostream& out, const Eigen::SparseMatrix<double>& A) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
    char buf[64];
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", long(it.row() + 1),
                          long(it.col() + 1), it.value());
            out << buf;
        }
}

inline void write_matrix_market_dense(std::ostream& out, const Eigen::MatrixXd& M) {
    out << "%%MatrixMarket matrix array real general\n";
    out << M.rows() << ' ' << M.cols() << '\n';
    char buf[64];
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g\n", M(i, j));
            out << buf;
        }
}

} // namespace prdg
