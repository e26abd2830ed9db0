#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "prdg/assembly.hpp"
#include "prdg/errors.hpp"
#include "prdg/mesh.hpp"
#include "prdg/mesh_io.hpp"
#include "prdg/patch.hpp"
#include "prdg/problems.hpp"
#include "prdg/recon.hpp"
#include "prdg/solve.hpp"

namespace prdg {

enum class mesh_source { tri, lshape, files };

struct study_config {
    std::string case_name = "ex1-sin2";
    mesh_source mesh = mesh_source::tri;
    std::vector<int> levels = {10, 20, 40};     // generator subdivisions per level
    std::vector<std::string> mesh_files;        // used when mesh == files
    std::vector<int> degrees = {2};
    patch_profile profile = patch_profile::example1;
    bool profile_set = false;
    int patch_size = 0;                         // custom profile only
    double mu = 0.0, eta = 0.0;                 // 0 = defaults 5m^4, 5m^2
    assembly_mode mode = assembly_mode::reconstructed;
    std::string out = "study.csv";
    bool dump_matrix = false;

    void validate() const {
        if (degrees.empty())
            throw config_error("at least one polynomial degree required");
        if (mesh == mesh_source::files) {
            if (mesh_files.empty())
                throw config_error("mesh = files requires a 'meshes' list");
        } else if (levels.empty()) {
            throw config_error("at least one level required");
        }
        for (int n : levels)
            if (n < 1)
                throw config_error("levels must be >= 1");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& v, const std::string& key);

template <>
inline int parse_number<int>(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        int r = std::stoi(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': expected integer, got '" + v + "'");
    }
}

template <>
inline double parse_number<double>(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': expected number, got '" + v + "'");
    }
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream ss(s);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok)
        out.push_back(tok);
    return out;
}

} // namespace detail

inline mesh_source parse_mesh_source(const std::string& v) {
    if (v == "tri") return mesh_source::tri;
    if (v == "lshape") return mesh_source::lshape;
    if (v == "files") return mesh_source::files;
    throw config_error("unknown mesh source: " + v + " (known: tri, lshape, files)");
}

inline assembly_mode parse_mode(const std::string& v) {
    if (v == "reconstructed") return assembly_mode::reconstructed;
    if (v == "baseline-full-dg" || v == "baseline") return assembly_mode::baseline_full_dg;
    throw config_error("unknown mode: " + v + " (known: reconstructed, baseline-full-dg)");
}

/* Flat key = value file; '#' starts a comment; list values are
 * whitespace-separated. Unknown keys are rejected. */
inline study_config parse_study_config(std::istream& in, const std::string& path = "<config>") {
    study_config cfg;
    bool mesh_set = false;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error(path, lineno, "expected 'key = value'", error_kind::config);
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (val.empty())
            throw parse_error(path, lineno, "empty value for key '" + key + "'", error_kind::config);

        if (key == "case") {
            cfg.case_name = val;
        } else if (key == "mesh") {
            cfg.mesh = parse_mesh_source(val);
            mesh_set = true;
        } else if (key == "levels") {
            cfg.levels.clear();
            for (const std::string& tok : detail::split_ws(val))
                cfg.levels.push_back(detail::parse_number<int>(tok, key));
        } else if (key == "meshes") {
            cfg.mesh_files = detail::split_ws(val);
        } else if (key == "m") {
            cfg.degrees.clear();
            for (const std::string& tok : detail::split_ws(val))
                cfg.degrees.push_back(detail::parse_number<int>(tok, key));
        } else if (key == "profile") {
            cfg.profile = parse_patch_profile(val);
            cfg.profile_set = true;
        } else if (key == "patch_size") {
            cfg.patch_size = detail::parse_number<int>(val, key);
        } else if (key == "mu") {
            cfg.mu = detail::parse_number<double>(val, key);
        } else if (key == "eta") {
            cfg.eta = detail::parse_number<double>(val, key);
        } else if (key == "mode") {
            cfg.mode = parse_mode(val);
        } else if (key == "out") {
            cfg.out = val;
        } else if (key == "dump_matrix") {
            cfg.dump_matrix = val == "1" || val == "true" || val == "yes";
        } else {
            throw parse_error(path, lineno, "unknown key '" + key + "'", error_kind::config);
        }
    }
    if (!mesh_set && !cfg.mesh_files.empty())
        cfg.mesh = mesh_source::files;
    return cfg;
}

inline study_config parse_study_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open config file: " + path);
    return parse_study_config(in, path);
}

/* Each case family has its own patch-size table row; the L-shape study
 * shares the example1 row. */
inline patch_profile default_profile(const std::string& case_name) {
    if (case_name == "ex3-ss")
        return patch_profile::example3;
    return patch_profile::example1;
}

struct study_row {
    int level = 0;
    error_report err;
    rate_entry rate_l2, rate_energy;
    double lambda_max = 0.0;
    double residual = 0.0;
};

struct study_result {
    int m = 0;
    std::string csv_path;
    std::vector<study_row> rows;
};

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::string rate_str(const rate_entry& r) {
    if (r.kind == rate_entry::tag::value)
        return fmt("%.4f", r.value);
    if (r.kind == rate_entry::tag::exact)
        return "exact";
    return "";
}

inline std::string csv_path_for(const std::string& out, int m, bool multi) {
    if (!multi)
        return out;
    std::filesystem::path p(out);
    std::filesystem::path q = p.parent_path() / (p.stem().string() + "-m" + std::to_string(m) +
                                                 p.extension().string());
    return q.string();
}

inline void write_csv(const std::string& path, const std::vector<study_row>& rows) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open output file: " + path);
    out << "level,h,dofs,err_l2,err_energy,err_h2broken,rate_l2,rate_energy,lambda_max,"
           "solver_residual\n";
    for (const study_row& r : rows) {
        out << r.level << ',' << fmt("%.6e", r.err.h) << ',' << r.err.dofs << ','
            << fmt("%.6e", r.err.l2) << ',' << fmt("%.6e", r.err.energy) << ','
            << fmt("%.6e", r.err.h2broken) << ',' << rate_str(r.rate_l2) << ','
            << rate_str(r.rate_energy) << ',' << fmt("%.6e", r.lambda_max) << ','
            << fmt("%.6e", r.residual) << '\n';
    }
}

} // namespace detail

inline poly_mesh build_level_mesh(const study_config& cfg, size_t level) {
    switch (cfg.mesh) {
    case mesh_source::tri:
        return generate_structured_tri(cfg.levels[level], rect_domain{{0, 0}, {1, 1}});
    case mesh_source::lshape:
        return generate_lshape_tri(cfg.levels[level]);
    case mesh_source::files:
        return load_mesh(cfg.mesh_files[level]);
    }
    throw config_error("invalid mesh source");
}

inline std::vector<study_result> run_study(const study_config& cfg_in,
                                           std::ostream& log) {
    study_config cfg = cfg_in;
    cfg.validate();
    if (!cfg.profile_set)
        cfg.profile = default_profile(cfg.case_name);

    const size_t n_levels =
        cfg.mesh == mesh_source::files ? cfg.mesh_files.size() : cfg.levels.size();
    const bool multi = cfg.degrees.size() > 1;
    std::vector<study_result> results;

    for (int m : cfg.degrees) {
        const manufactured_case cse = get_case(cfg.case_name, m);
        penalty_config pen = penalty_config::defaults_for(m);
        if (cfg.mu > 0.0)
            pen.mu = cfg.mu;
        if (cfg.eta > 0.0)
            pen.eta = cfg.eta;
        const int target = patch_size_for_degree(m, cfg.profile, cfg.patch_size);

        study_result res;
        res.m = m;
        log << "case " << cse.name << "  mode " << to_string(cfg.mode) << "  bc "
            << to_string(cse.bc) << "  m=" << m << "  #S(K)=" << target << "  mu=" << pen.mu
            << "  eta=" << pen.eta << "\n";

        for (size_t lvl = 0; lvl < n_levels; ++lvl) {
            poly_mesh mesh = build_level_mesh(cfg, lvl);
            recon_operator recon = build_recon(mesh, m, target);
            lambda_report lam = estimate_lambda(recon, mesh);
            discrete_system sys = assemble(mesh, recon, cse, pen, cfg.mode);
            solve_report sol = solve(sys);
            cell_poly_field field = cfg.mode == assembly_mode::reconstructed
                                        ? reconstruct_field(recon, sol.x)
                                        : baseline_field(mesh, m, sol.x);
            study_row row;
            row.level = int(lvl) + 1;
            row.err = compute_errors(mesh, field, cse, size_t(sys.num_dofs()));
            row.lambda_max = lam.max;
            row.residual = sol.residual;
            res.rows.push_back(row);

            if (cfg.dump_matrix) {
                std::filesystem::path p(cfg.out);
                std::string mtx = (p.parent_path() /
                                   (p.stem().string() + "-m" + std::to_string(m) + "-L" +
                                    std::to_string(lvl + 1) + ".mtx"))
                                      .string();
                std::ofstream mout(mtx);
                if (!mout)
                    throw io_error("cannot open matrix dump file: " + mtx);
                write_matrix_market(mout, sys.A);
            }
        }

        std::vector<double> hs, el2, een;
        for (const study_row& r : res.rows) {
            hs.push_back(r.err.h);
            el2.push_back(r.err.l2);
            een.push_back(r.err.energy);
        }
        if (res.rows.size() >= 2) {
            std::vector<rate_entry> rl2 = pairwise_rates(hs, el2);
            std::vector<rate_entry> ren = pairwise_rates(hs, een);
            for (size_t i = 0; i < res.rows.size(); ++i) {
                res.rows[i].rate_l2 = rl2[i];
                res.rows[i].rate_energy = ren[i];
            }
        }

        res.csv_path = detail::csv_path_for(cfg.out, m, multi);
        detail::write_csv(res.csv_path, res.rows);

        log << " level      h        dofs     err_l2    rate    err_energy  rate    "
               "lambda   residual\n";
        for (const study_row& r : res.rows) {
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          " %5d  %.4e %8zu  %.4e %-7s %.4e %-7s %8.3f  %.2e\n", r.level,
                          r.err.h, r.err.dofs, r.err.l2, detail::rate_str(r.rate_l2).c_str(),
                          r.err.energy, detail::rate_str(r.rate_energy).c_str(), r.lambda_max,
                          r.residual);
            log << buf;
        }
        log << " wrote " << res.csv_path << "\n";
        results.push_back(std::move(res));
    }
    return results;
}

} // namespace prdg
