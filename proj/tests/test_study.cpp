#include <catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "prdg/cli.hpp"
#include "prdg/errors.hpp"
#include "prdg/mesh_io.hpp"
#include "prdg/study.hpp"

using namespace prdg;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "prdg_study_tests";
    fs::create_directories(dir);
    return dir;
}

std::string write_text(const std::string& name, const std::string& content) {
    fs::path p = work_dir() / name;
    std::ofstream out(p);
    out << content;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::initializer_list<std::string> args, std::ostream& log) {
    std::vector<std::string> owned{"prdg"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const std::string& a : owned) argv.push_back(a.c_str());
    return cli_main(int(argv.size()), argv.data(), log);
}

study_config parse_str(const std::string& text) {
    std::istringstream in(text);
    return parse_study_config(in);
}

} // namespace

TEST_CASE("config parsing") {
    SECTION("every key round-trips") {
        study_config cfg = parse_str("case = ex3-ss\n"
                                     "mesh = lshape\n"
                                     "levels = 6 13 26\n"
                                     "m = 2 3\n"
                                     "profile = example3\n"
                                     "patch_size = 12\n"
                                     "mu = 80.5\n"
                                     "eta = 20\n"
                                     "mode = baseline-full-dg\n"
                                     "out = results/run.csv\n"
                                     "dump_matrix = true\n");
        CHECK(cfg.case_name == "ex3-ss");
        CHECK(cfg.mesh == mesh_source::lshape);
        CHECK(cfg.levels == std::vector<int>{6, 13, 26});
        CHECK(cfg.degrees == std::vector<int>{2, 3});
        CHECK(cfg.profile == patch_profile::example3);
        CHECK(cfg.profile_set);
        CHECK(cfg.patch_size == 12);
        CHECK(cfg.mu == Catch::Approx(80.5));
        CHECK(cfg.eta == Catch::Approx(20.0));
        CHECK(cfg.mode == assembly_mode::baseline_full_dg);
        CHECK(cfg.out == "results/run.csv");
        CHECK(cfg.dump_matrix);
    }
    SECTION("comments, blanks, and defaults") {
        study_config cfg = parse_str("# full-line comment\n"
                                     "\n"
                                     "case = ex1-sin2   # trailing comment\n");
        CHECK(cfg.case_name == "ex1-sin2");
        CHECK(cfg.mesh == mesh_source::tri);
        CHECK(cfg.levels == std::vector<int>{10, 20, 40});
        CHECK(cfg.degrees == std::vector<int>{2});
        CHECK_FALSE(cfg.profile_set);
        CHECK(cfg.out == "study.csv");
    }
    SECTION("a meshes list implies file input") {
        study_config cfg = parse_str("meshes = a.txt b.txt\n");
        CHECK(cfg.mesh == mesh_source::files);
        CHECK(cfg.mesh_files == std::vector<std::string>{"a.txt", "b.txt"});
    }
    SECTION("malformed input") {
        CHECK_THROWS_AS(parse_str("case ex1-sin2\n"), parse_error);
        CHECK_THROWS_AS(parse_str("unknown_key = 1\n"), parse_error);
        CHECK_THROWS_AS(parse_str("case =\n"), parse_error);
        CHECK_THROWS_AS(parse_str("levels = 10 x 40\n"), config_error);
        CHECK_THROWS_AS(parse_str("mu = fast\n"), config_error);
        CHECK_THROWS_AS(parse_str("mode = magic\n"), config_error);
        CHECK_THROWS_AS(parse_str("mesh = hex\n"), config_error);
        try {
            parse_str("case = ex1-sin2\nbogus = 1\n");
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 2);
        }
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(parse_study_config(work_dir().string() + "/no-such.cfg"), io_error);
    }
    SECTION("validation") {
        study_config cfg;
        cfg.degrees.clear();
        CHECK_THROWS_AS(cfg.validate(), config_error);

        study_config files;
        files.mesh = mesh_source::files;
        CHECK_THROWS_AS(files.validate(), config_error);

        study_config zero;
        zero.levels = {0};
        CHECK_THROWS_AS(zero.validate(), config_error);
    }
}

TEST_CASE("csv naming for multi-degree runs") {
    CHECK(detail::csv_path_for("study.csv", 3, false) == "study.csv");
    CHECK(detail::csv_path_for("study.csv", 3, true) == "study-m3.csv");
    CHECK(fs::path(detail::csv_path_for("out/run.csv", 2, true)).filename() == "run-m2.csv");
}

TEST_CASE("run_study on polynomial data") {
    study_config cfg;
    cfg.case_name = "poly-exact-m";
    cfg.levels = {4};
    cfg.degrees = {2};
    cfg.out = (work_dir() / "poly.csv").string();

    std::ostringstream log;
    auto results = run_study(cfg, log);
    REQUIRE(results.size() == 1);
    REQUIRE(results[0].rows.size() == 1);
    CHECK(results[0].rows[0].err.l2 < 1e-8);
    CHECK(results[0].rows[0].err.energy < 1e-8);
    CHECK(results[0].rows[0].lambda_max >= 1.0);
    CHECK(results[0].csv_path == cfg.out);

    std::string csv = slurp(cfg.out);
    CHECK(csv.rfind("level,h,dofs,err_l2,err_energy,err_h2broken,rate_l2,rate_energy,"
                     "lambda_max,solver_residual\n",
                     0) == 0);

    SECTION("reruns are byte-identical") {
        std::ostringstream log2;
        run_study(cfg, log2);
        CHECK(slurp(cfg.out) == csv);
    }
}

TEST_CASE("run_study rates and multi-degree output") {
    study_config cfg;
    cfg.case_name = "ex1-sin2";
    cfg.levels = {4, 8};
    cfg.degrees = {2, 3};
    cfg.out = (work_dir() / "multi.csv").string();

    std::ostringstream log;
    auto results = run_study(cfg, log);
    REQUIRE(results.size() == 2);
    CHECK(results[0].csv_path == (work_dir() / "multi-m2.csv").string());
    CHECK(results[1].csv_path == (work_dir() / "multi-m3.csv").string());
    CHECK(fs::exists(results[0].csv_path));
    CHECK(fs::exists(results[1].csv_path));

    for (const auto& res : results) {
        REQUIRE(res.rows.size() == 2);
        CHECK(res.rows[0].rate_l2.kind == rate_entry::tag::none);
        CHECK(res.rows[1].rate_l2.kind == rate_entry::tag::value);
        CHECK(res.rows[1].rate_l2.value > 0.5); // errors must shrink under refinement
    }
}

TEST_CASE("cli run command") {
    std::string cfg = write_text("cli-run.cfg", "case = poly-exact-m\n"
                                                "levels = 4\n"
                                                "m = 2\n"
                                                "out = " +
                                                    (work_dir() / "cli-run.csv").string() + "\n");
    std::ostringstream log;
    SECTION("successful study returns zero") {
        CHECK(run_cli({"run", "--config", cfg}, log) == 0);
        CHECK(fs::exists(work_dir() / "cli-run.csv"));
        CHECK(log.str().find("poly-exact") != std::string::npos);
    }
    SECTION("mode and out overrides") {
        std::string out = (work_dir() / "cli-base.csv").string();
        CHECK(run_cli({"run", "--config", cfg, "--mode", "baseline", "--out", out}, log) == 0);
        CHECK(fs::exists(out));
        CHECK(log.str().find("baseline-full-dg") != std::string::npos);
    }
    SECTION("dump-matrix flag writes an .mtx per level") {
        std::string out = (work_dir() / "cli-dump.csv").string();
        CHECK(run_cli({"run", "--config", cfg, "--out", out, "--dump-matrix"}, log) == 0);
        CHECK(fs::exists(work_dir() / "cli-dump-m2-L1.mtx"));
    }
}

TEST_CASE("cli exit codes") {
    std::ostringstream log;
    SECTION("usage errors") {
        CHECK(run_cli({}, log) == 2);
        CHECK(run_cli({"run"}, log) == 2); // --config is required
        CHECK(run_cli({"frobnicate"}, log) == 2);
    }
    SECTION("config errors") {
        std::string bad_case =
            write_text("bad-case.cfg", "case = ex9\nlevels = 4\nm = 2\n");
        CHECK(run_cli({"run", "--config", bad_case}, log) == 2);

        std::string bad_key = write_text("bad-key.cfg", "casse = ex1-sin2\n");
        CHECK(run_cli({"run", "--config", bad_key}, log) == 2);
    }
    SECTION("io errors") {
        CHECK(run_cli({"run", "--config", (work_dir() / "absent.cfg").string()}, log) == 4);
        CHECK(run_cli({"mesh-info", (work_dir() / "absent.txt").string()}, log) == 4);
    }
    SECTION("numeric errors") {
        // collinear barycenters: the m=1 fit on a quad chain is rank deficient
        std::vector<vec2> verts;
        for (int i = 0; i <= 7; ++i) verts.push_back({i / 7.0, 0.0});
        for (int i = 0; i <= 7; ++i) verts.push_back({i / 7.0, 1.0});
        std::vector<std::vector<int>> cells;
        for (int i = 0; i < 7; ++i) cells.push_back({i, i + 1, 9 + i, 8 + i});
        std::string mesh_path = (work_dir() / "chain7.txt").string();
        write_native(mesh_path, build_mesh(verts, cells));

        std::string cfg = write_text("chain.cfg", "case = poly-exact-m\n"
                                                  "meshes = " +
                                                      mesh_path +
                                                      "\n"
                                                      "m = 1\n"
                                                      "profile = custom\n"
                                                      "patch_size = 7\n"
                                                      "out = " +
                                                      (work_dir() / "chain.csv").string() + "\n");
        CHECK(run_cli({"run", "--config", cfg}, log) == 3);
    }
}

TEST_CASE("cli mesh-info") {
    std::ostringstream log;
    SECTION("native mesh") {
        std::string path = (work_dir() / "tri2.txt").string();
        write_native(path, generate_structured_tri(2, rect_domain{{0, 0}, {1, 1}}));
        CHECK(run_cli({"mesh-info", path}, log) == 0);
        std::string s = log.str();
        CHECK(s.find("vertices") != std::string::npos);
        CHECK(s.find("total area") != std::string::npos);
        CHECK(s.find("shape reg sigma") != std::string::npos);
    }
    SECTION("msh import with ignored element types") {
        std::string path = write_text("two-tri.msh", "$MeshFormat\n"
                                                     "2.2 0 8\n"
                                                     "$EndMeshFormat\n"
                                                     "$Nodes\n"
                                                     "4\n"
                                                     "1 0 0 0\n"
                                                     "2 1 0 0\n"
                                                     "3 0 1 0\n"
                                                     "4 1 1 0\n"
                                                     "$EndNodes\n"
                                                     "$Elements\n"
                                                     "3\n"
                                                     "1 1 2 0 1 1 2\n"
                                                     "2 2 2 0 1 1 2 3\n"
                                                     "3 2 2 0 1 2 4 3\n"
                                                     "$EndElements\n");
        CHECK(run_cli({"mesh-info", path}, log) == 0);
        std::string s = log.str();
        CHECK(s.find("warning") != std::string::npos);
        CHECK(s.find("cells") != std::string::npos);
    }
}

TEST_CASE("cli dump-basis") {
    std::string cfg = write_text("dump.cfg", "case = ex1-sin2\nlevels = 4\nm = 2\n");
    std::ostringstream log;
    SECTION("prints the coefficient map") {
        CHECK(run_cli({"dump-basis", "--config", cfg, "--cell", "3"}, log) == 0);
        std::string s = log.str();
        CHECK(s.find("%% M_K for cell 3") != std::string::npos);
        CHECK(s.find("patch members:") != std::string::npos);
        CHECK(s.find("%%MatrixMarket matrix array real general") != std::string::npos);
    }
    SECTION("cell out of range") {
        CHECK(run_cli({"dump-basis", "--config", cfg, "--cell", "999"}, log) == 2);
    }
    SECTION("written to a file") {
        std::string out = (work_dir() / "mk.mtx").string();
        CHECK(run_cli({"dump-basis", "--config", cfg, "--cell", "0", "--out", out}, log) == 0);
        CHECK(slurp(out).find("%%MatrixMarket") != std::string::npos);
    }
}
