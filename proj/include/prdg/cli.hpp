#pragma once

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "prdg/errors.hpp"
#include "prdg/mesh_io.hpp"
#include "prdg/patch.hpp"
#include "prdg/recon.hpp"
#include "prdg/study.hpp"

namespace prdg {

namespace detail {

inline int cmd_run(const std::string& config_path, const std::vector<int>& m_override,
                   double mu, double eta, const std::string& mode_override,
                   const std::string& out_override, bool dump_matrix, std::ostream& log) {
    study_config cfg = parse_study_config(config_path);
    if (!m_override.empty())
        cfg.degrees = m_override;
    if (mu > 0.0)
        cfg.mu = mu;
    if (eta > 0.0)
        cfg.eta = eta;
    if (!mode_override.empty())
        cfg.mode = parse_mode(mode_override);
    if (!out_override.empty())
        cfg.out = out_override;
    if (dump_matrix)
        cfg.dump_matrix = true;
    run_study(cfg, log);
    return 0;
}

inline int cmd_mesh_info(const std::string& path, std::ostream& log) {
    std::vector<std::string> warnings;
    poly_mesh mesh = load_mesh(path, &warnings);
    for (const std::string& w : warnings)
        log << "warning: " << w << "\n";
    size_t boundary = 0;
    for (const mesh_face& f : mesh.faces)
        if (f.is_boundary())
            ++boundary;
    log << "mesh " << path << "\n"
        << "  vertices        " << mesh.num_vertices() << "\n"
        << "  cells           " << mesh.num_cells() << "\n"
        << "  faces           " << mesh.num_faces() << " (" << mesh.num_faces() - boundary
        << " interior, " << boundary << " boundary)\n"
        << "  h (max diam)    " << mesh.max_diameter() << "\n"
        << "  total area      " << mesh.total_area() << "\n"
        << "  shape reg sigma " << mesh.shape_regularity() << "\n";
    return 0;
}

inline int cmd_dump_basis(const std::string& config_path, int cell, int m_flag,
                          const std::string& out_path, std::ostream& log) {
    study_config cfg = parse_study_config(config_path);
    if (!cfg.profile_set)
        cfg.profile = default_profile(cfg.case_name);
    const int m = m_flag > 0 ? m_flag : cfg.degrees.at(0);
    poly_mesh mesh = build_level_mesh(cfg, 0);
    if (cell < 0 || size_t(cell) >= mesh.num_cells())
        throw config_error("cell index out of range (mesh has " +
                           std::to_string(mesh.num_cells()) + " cells)");
    const int target = patch_size_for_degree(m, cfg.profile, cfg.patch_size);
    recon_operator recon = build_recon(mesh, m, target);

    std::ofstream file;
    std::ostream* out = &log;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file)
            throw io_error("cannot open output file: " + out_path);
        out = &file;
    }
    const patch& p = recon.cell_patch(cell);
    *out << "%% M_K for cell " << cell << ", m = " << m << "\n%% patch members:";
    for (int member : p.members)
        *out << ' ' << member;
    *out << "\n%% sigma_min " << recon.sigma_min(cell) << "  sigma_max "
         << recon.sigma_max(cell) << "\n";
    write_matrix_market_dense(*out, recon.coefficient_map(cell));
    return 0;
}

} // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& log = std::cout) {
    CLI::App app{"patch-reconstruction DG solver for the 2D biharmonic problem"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a convergence study from a config file");
    std::string config_path, mode_override, out_override;
    std::vector<int> m_override;
    double mu = 0.0, eta = 0.0;
    bool dump_matrix = false;
    run->add_option("--config", config_path, "study config file")->required();
    run->add_option("--m", m_override, "polynomial degree(s), overrides config");
    run->add_option("--mu", mu, "u-jump penalty factor (alpha = mu/h^3)");
    run->add_option("--eta", eta, "gradient-jump penalty factor (beta = eta/h)");
    run->add_option("--mode", mode_override, "reconstructed | baseline-full-dg");
    run->add_option("--out", out_override, "output CSV path");
    run->add_flag("--dump-matrix", dump_matrix, "write the stiffness matrix per level");

    auto* info = app.add_subcommand("mesh-info", "print mesh statistics");
    std::string mesh_path;
    info->add_option("file", mesh_path, "mesh file (native or .msh)")->required();

    auto* dump = app.add_subcommand("dump-basis", "dump a cell's coefficient map M_K");
    std::string dump_config, dump_out;
    int cell = 0, dump_m = 0;
    dump->add_option("--config", dump_config, "study config file")->required();
    dump->add_option("--cell", cell, "cell index")->required();
    dump->add_option("--m", dump_m, "polynomial degree (default: first from config)");
    dump->add_option("--out", dump_out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // usage problems are config errors
    }

    try {
        if (run->parsed())
            return detail::cmd_run(config_path, m_override, mu, eta, mode_override,
                                   out_override, dump_matrix, log);
        if (info->parsed())
            return detail::cmd_mesh_info(mesh_path, log);
        if (dump->parsed())
            return detail::cmd_dump_basis(dump_config, cell, dump_m, dump_out, log);
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace prdg
