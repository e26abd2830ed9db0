/* Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
 * hard criterion fails. Soft diagnostics are reported inline. */
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "prdg/assembly.hpp"
#include "prdg/errors.hpp"
#include "prdg/mesh.hpp"
#include "prdg/mesh_io.hpp"
#include "prdg/patch.hpp"
#include "prdg/problems.hpp"
#include "prdg/recon.hpp"
#include "prdg/solve.hpp"

#ifndef PRDG_DATA_DIR
#define PRDG_DATA_DIR "tests/data"
#endif

using namespace prdg;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string num(double v, const char* spec = "%.3g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

struct level_result {
    error_report err;
    double lambda_max = 0.0;
};

level_result run_level(const poly_mesh& mesh, const manufactured_case& cse, int m,
                       int target, penalty_config pen,
                       assembly_mode mode = assembly_mode::reconstructed) {
    recon_operator recon = build_recon(mesh, m, target);
    level_result res;
    res.lambda_max = estimate_lambda(recon, mesh).max;
    discrete_system sys = assemble(mesh, recon, cse, pen, mode);
    solve_report sol = solve(sys);
    cell_poly_field field = mode == assembly_mode::reconstructed
                                ? reconstruct_field(recon, sol.x)
                                : baseline_field(mesh, m, sol.x);
    res.err = compute_errors(mesh, field, cse, size_t(sys.num_dofs()));
    return res;
}

double last_rate(const std::vector<double>& hs, const std::vector<double>& es) {
    auto rates = pairwise_rates(hs, es);
    return rates.back().value;
}

bool in_window(double v, double lo, double hi) { return v >= lo && v <= hi; }

/* Five 0.2 x 1 quads in a row on the unit square; barycenters sit at
 * x = 0.1, 0.3, 0.5, 0.7, 0.9. */
poly_mesh chain_mesh5() {
    std::vector<vec2> verts;
    for (int i = 0; i <= 5; ++i) verts.push_back({i / 5.0, 0.0});
    for (int i = 0; i <= 5; ++i) verts.push_back({i / 5.0, 1.0});
    std::vector<std::vector<int>> cells;
    for (int i = 0; i < 5; ++i) cells.push_back({i, i + 1, 7 + i, 6 + i});
    return build_mesh(verts, cells);
}

int g_failures = 0;

void report(int n, bool pass, const std::string& detail) {
    std::printf("ACCEPTANCE %d: %s  %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

template <class Fn>
void criterion(int n, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(n, false, std::string("exception: ") + e.what());
    }
}

void criterion1() {
    const double t0 = now_s();
    double max_l2 = 0.0, max_energy = 0.0;
    poly_mesh mesh = generate_structured_tri(8, rect_domain{{0, 0}, {1, 1}});
    for (int m : {2, 3, 4}) {
        level_result res =
            run_level(mesh, get_case("poly-exact-m", m), m,
                      patch_size_for_degree(m, patch_profile::example1),
                      penalty_config::defaults_for(m));
        max_l2 = std::max(max_l2, res.err.l2);
        max_energy = std::max(max_energy, res.err.energy);
    }
    const double dt = now_s() - t0;
    bool pass = max_l2 < 1e-8 && max_energy < 1e-8 && dt < 5.0;
    report(1, pass,
           "poly-exact m=2,3,4 on tri n=8: max l2 " + num(max_l2) + ", max energy " +
               num(max_energy) + " (limit 1e-8); " + num(dt, "%.1f") + " s (limit 5)");
}

void criterion2() {
    const double t0 = now_s();
    std::vector<poly_mesh> meshes;
    for (const char* name : {"square_tri_10.txt", "square_tri_20.txt", "square_tri_40.txt"})
        meshes.push_back(load_mesh(std::string(PRDG_DATA_DIR) + "/" + name));

    bool pass = true;
    std::string detail = "ex1 on tri meshes h=1/10,1/20,1/40:";
    for (int m : {2, 3, 4}) {
        manufactured_case cse = get_case("ex1-sin2", m);
        const int target = patch_size_for_degree(m, patch_profile::example1);
        std::vector<double> hs, l2s, ens;
        for (const poly_mesh& mesh : meshes) {
            level_result res = run_level(mesh, cse, m, target, penalty_config::defaults_for(m));
            hs.push_back(res.err.h);
            l2s.push_back(res.err.l2);
            ens.push_back(res.err.energy);
        }
        const double rl2 = last_rate(hs, l2s);
        const double ren = last_rate(hs, ens);
        const double l2_ref = m == 2 ? 2.0 : double(m + 1);
        const bool ok_l2 = in_window(rl2, l2_ref - 0.4, l2_ref + 0.4);
        const bool ok_en = in_window(ren, double(m - 1) - 0.4, double(m - 1) + 0.4);
        pass = pass && ok_l2 && ok_en;
        detail += " m=" + std::to_string(m) + " l2 " + num(rl2, "%.2f") + "/" +
                  num(l2_ref, "%.0f") + (ok_l2 ? "" : " OUT") + " energy " + num(ren, "%.2f") +
                  "/" + std::to_string(m - 1) + (ok_en ? "" : " OUT") + ";";
        if (!ok_l2 && m == 4)
            detail += " (m=4 l2 is still in the h^6 duality regime above the h^5"
                      " approximation floor at these sizes)";
    }
    const double dt = now_s() - t0;
    pass = pass && dt < 120.0;
    detail += " " + num(dt, "%.1f") + " s (limit 120)";
    report(2, pass, detail);
}

void criterion3() {
    const double t0 = now_s();
    manufactured_case cse = get_case("ex3-ss", 3);
    const int target = patch_size_for_degree(3, patch_profile::example3);
    std::vector<double> hs, l2s, ens;
    for (const char* name : {"mixed_10.txt", "mixed_20.txt", "mixed_40.txt"}) {
        poly_mesh mesh = load_mesh(std::string(PRDG_DATA_DIR) + "/" + name);
        level_result res = run_level(mesh, cse, 3, target, penalty_config::defaults_for(3));
        hs.push_back(res.err.h);
        l2s.push_back(res.err.l2);
        ens.push_back(res.err.energy);
    }
    const double rl2 = last_rate(hs, l2s);
    const double ren = last_rate(hs, ens);
    const double dt = now_s() - t0;
    bool pass = rl2 >= 3.4 && ren >= 1.6 && dt < 120.0;
    report(3, pass,
           "ex3-ss m=3 on mixed meshes: last l2 rate " + num(rl2, "%.2f") +
               " (need >= 3.4), energy rate " + num(ren, "%.2f") + " (need >= 1.6); " +
               num(dt, "%.1f") + " s (limit 120)");
}

void criterion4() {
    const double t0 = now_s();
    // reference errors at DOFs 250 / 1000 / 4000
    const double ref_l2[3][3] = {{1.38e-3, 6.15e-4, 2.68e-4},
                                 {8.58e-4, 3.11e-4, 1.22e-4},
                                 {1.08e-3, 3.19e-4, 1.11e-4}};
    const double ref_dg[3][3] = {{3.35e-1, 2.03e-1, 1.23e-1},
                                 {2.42e-1, 1.31e-1, 8.43e-2},
                                 {3.43e-1, 1.76e-1, 1.08e-1}};
    // the reference study does not report mu, eta; these reproduce its error
    // magnitudes (the L2 error scales about linearly with mu)
    const penalty_config pens[3] = {penalty_config::defaults_for(2),
                                    {50.625, 5.625},
                                    {160.0, 10.0}};
    std::vector<poly_mesh> meshes;
    for (int n : {6, 13, 26}) meshes.push_back(generate_lshape_tri(n));

    bool pass = true;
    std::string detail = "lshape DOFs 216/1014/4056:";
    for (int mi = 0; mi < 3; ++mi) {
        const int m = mi + 2;
        manufactured_case cse = get_case("lshape-singular", m);
        const int target = patch_size_for_degree(m, patch_profile::example1);
        std::vector<double> hs, l2s, ens;
        double worst_ratio = 1.0;
        for (int lvl = 0; lvl < 3; ++lvl) {
            level_result res = run_level(meshes[size_t(lvl)], cse, m, target, pens[mi]);
            hs.push_back(res.err.h);
            l2s.push_back(res.err.l2);
            ens.push_back(res.err.energy);
            for (double r : {res.err.l2 / ref_l2[mi][lvl], res.err.energy / ref_dg[mi][lvl]})
                worst_ratio = std::max(worst_ratio, r > 1.0 ? r : 1.0 / r);
        }
        const double rl2 = last_rate(hs, l2s);
        const double ren = last_rate(hs, ens);
        const bool ok = in_window(rl2, 1.0, 1.45) && in_window(ren, 0.55, 0.85) &&
                        worst_ratio < 10.0;
        pass = pass && ok;
        detail += " m=" + std::to_string(m) + " l2 " + num(rl2, "%.2f") + " energy " +
                  num(ren, "%.2f") + " vs-ref x" + num(worst_ratio, "%.1f") +
                  (ok ? "" : " OUT") + ";";
    }
    const double dt = now_s() - t0;
    pass = pass && dt < 180.0;
    detail += " windows l2 [1.0,1.45] energy [0.55,0.85] ratio<10; " + num(dt, "%.1f") +
              " s (limit 180)";
    report(4, pass, detail);
}

void criterion5() {
    poly_mesh mesh = generate_structured_tri(6, rect_domain{{0, 0}, {1, 1}});
    bool pass = true;
    for (int m : {2, 3, 4}) {
        recon_operator recon =
            build_recon(mesh, m, patch_size_for_degree(m, patch_profile::example1));
        manufactured_case cse = get_case("ex1-sin2", m);
        penalty_config pen = penalty_config::defaults_for(m);
        if (m == 4) pen.mu *= 2.0; // baseline P4 needs a stronger penalty for SPD
        discrete_system rec = assemble(mesh, recon, cse, pen);
        discrete_system base = assemble(mesh, recon, cse, pen, assembly_mode::baseline_full_dg);
        pass = pass && rec.num_dofs() == mesh.num_cells() &&
               base.num_dofs() == Eigen::Index(mesh.num_cells()) * pm_dimension(m);
    }
    report(5, pass,
           pass ? "reconstructed DOFs = cells, baseline DOFs = cells x dim P_m for m=2,3,4"
                : "DOF counts do not match the mode contract");
}

void criterion6() {
    poly_mesh mesh = chain_mesh5();
    patch p1 = build_patch(mesh, 0, 3);
    const bool members_ok = p1.members == std::vector<int>{0, 1, 2};

    // hand fit: intercept/slope at x = 0.1, 0.3, 0.5 with samples (0, 1, 0)
    Eigen::MatrixXd A(3, 2);
    A << 1.0, 0.1, 1.0, 0.3, 1.0, 0.5;
    double smin = 0.0, smax = 0.0;
    Eigen::VectorXd c = ls_pseudo_inverse(A, smin, smax) * Eigen::Vector3d(0.0, 1.0, 0.0);
    double dev = std::abs(c(0) - 1.0 / 3.0) + std::abs(c(1));
    for (double x : {0.22, 0.3, 0.38})
        dev = std::max(dev, std::abs(c(0) + c(1) * x - 1.0 / 3.0));

    // production path, degree-0 analog: lambda_{K2} on K2 is the mean weight
    recon_operator op = build_recon(mesh, build_all_patches(mesh, 3), 0);
    for (vec2 q : {vec2{0.25, 0.3}, vec2{0.3, 0.5}, vec2{0.38, 0.9}})
        dev = std::max(dev, std::abs(op.eval_basis(1, q)[0] - 1.0 / 3.0));

    report(6, members_ok && dev < 1e-12,
           "five-cell chain: S(K1) = {K1,K2,K3} " + std::string(members_ok ? "ok" : "WRONG") +
               ", lambda_{K2}|_{K2} dev from 1/3 " + num(dev) + " (limit 1e-12)");
}

void criterion7() {
    bool pass = true;
    std::string detail;

    // partition of unity at 100 random points, m = 2, 3, 4
    double pou = 0.0;
    {
        poly_mesh mesh = generate_structured_tri(8, rect_domain{{0, 0}, {1, 1}});
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> uni(0.05, 0.95);
        for (int m : {2, 3, 4}) {
            recon_operator op =
                build_recon(mesh, m, patch_size_for_degree(m, patch_profile::example1));
            for (int trial = 0; trial < 100; ++trial) {
                int c = int(rng() % unsigned(mesh.num_cells()));
                auto tris = subtriangulate(mesh.cell_points(c));
                double u = uni(rng), v = uni(rng);
                if (u + v > 1.0) {
                    u = 1.0 - u;
                    v = 1.0 - v;
                }
                const triangle& t = tris[rng() % tris.size()];
                vec2 q = t.v[0] + u * (t.v[1] - t.v[0]) + v * (t.v[2] - t.v[0]);
                double sum = 0.0;
                for (double val : op.eval_basis(c, q)) sum += val;
                pou = std::max(pou, std::abs(sum - 1.0));
            }
        }
    }
    pass = pass && pou < 1e-11;
    detail += "pou " + num(pou) + " (limit 1e-11)";

    // matrix symmetry and coercivity at default penalties, tri n=4
    double sym = 0.0;
    bool coercive = true;
    double lam_min = 1e30;
    {
        poly_mesh mesh = generate_structured_tri(4, rect_domain{{0, 0}, {1, 1}});
        for (int m : {2, 3, 4}) {
            recon_operator recon =
                build_recon(mesh, m, patch_size_for_degree(m, patch_profile::example1));
            discrete_system sys = assemble(mesh, recon, get_case("ex1-sin2", m),
                                           penalty_config::defaults_for(m));
            double scale = 0.0, dev = 0.0;
            Eigen::SparseMatrix<double> D = sys.A - Eigen::SparseMatrix<double>(sys.A.transpose());
            for (int k = 0; k < sys.A.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it)
                    scale = std::max(scale, std::abs(it.value()));
            for (int k = 0; k < D.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
                    dev = std::max(dev, std::abs(it.value()));
            sym = std::max(sym, dev / scale);
            coercivity_result cr = coercivity_probe(sys);
            coercive = coercive && cr.spd && cr.lambda_min > 0.0;
            lam_min = std::min(lam_min, cr.lambda_min);
        }
    }
    pass = pass && sym < 1e-10 && coercive;
    detail += ", symmetry " + num(sym) + " (limit 1e-10), coercivity min lambda " +
              num(lam_min) + (coercive ? "" : " NOT SPD");

    // Lambda growth across two uniform refinements (soft)
    {
        std::string soft;
        for (int m : {2, 3, 4}) {
            const int target = patch_size_for_degree(m, patch_profile::example1);
            double prev = 0.0;
            double worst = 0.0;
            for (int n : {8, 16, 32}) {
                poly_mesh mesh = generate_structured_tri(n, rect_domain{{0, 0}, {1, 1}});
                double lam = estimate_lambda(build_recon(mesh, m, target), mesh).max;
                if (prev > 0.0) worst = std::max(worst, (lam - prev) / prev);
                prev = lam;
            }
            soft += (soft.empty() ? "" : "/") + num(100.0 * worst, "%.1f") + "%";
            if (worst >= 0.25)
                detail += " [soft: Lambda growth " + num(100.0 * worst, "%.1f") + "% for m=" +
                          std::to_string(m) + " exceeds 25%]";
        }
        detail += ", Lambda growth m=2,3,4: " + soft + " (soft limit 25%)";
    }
    report(7, pass, detail);
}

void criterion8() {
    const double t0 = now_s();
    bool pass = true;
    std::string detail = "equal-DOF l2 comparison (reconstructed vs baseline):";
    const int rec_n[2] = {20, 19}, base_n[2] = {8, 6};
    for (int mi = 0; mi < 2; ++mi) {
        const int m = mi + 2;
        manufactured_case cse = get_case("ex1-sin2", m);
        penalty_config pen = penalty_config::defaults_for(m);
        const int target = patch_size_for_degree(m, patch_profile::example1);

        poly_mesh rmesh = generate_structured_tri(rec_n[mi], rect_domain{{0, 0}, {1, 1}});
        level_result rec = run_level(rmesh, cse, m, target, pen);

        poly_mesh bmesh = generate_structured_tri(base_n[mi], rect_domain{{0, 0}, {1, 1}});
        level_result base =
            run_level(bmesh, cse, m, target, pen, assembly_mode::baseline_full_dg);

        const double ratio = rec.err.l2 / base.err.l2;
        const bool ok = ratio <= 3.0;
        pass = pass && ok;
        detail += " m=" + std::to_string(m) + " " + std::to_string(rec.err.dofs) + " vs " +
                  std::to_string(base.err.dofs) + " dofs, ratio " + num(ratio, "%.2f") +
                  (ok ? "" : " OUT") + ";";
    }
    const double dt = now_s() - t0;
    pass = pass && dt < 180.0;
    detail += " limit 3.0; " + num(dt, "%.1f") + " s (limit 180)";
    report(8, pass, detail);
}

} // namespace

int main() {
    criterion(1, criterion1);
    criterion(2, criterion2);
    criterion(3, criterion3);
    criterion(4, criterion4);
    criterion(5, criterion5);
    criterion(6, criterion6);
    criterion(7, criterion7);
    criterion(8, criterion8);
    std::printf("acceptance summary: %d/8 criteria passed\n", 8 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
