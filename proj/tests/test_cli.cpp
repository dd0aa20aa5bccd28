#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("opt3d1d_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string &args, const std::string &env = "") {
  const std::string cmd = env + " \"" OPT3D1D_CLI "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("solve writes fields, errors, residuals and a manifest") {
  const fs::path dir = scratch("solve");
  CHECK(run("solve --problem tp1 --n 3 --tol 1e-8 --dump-matrices -o " + dir.string()) == 0);
  for (const char *f : {"solution_3d.vtk", "solution_1d.vtk", "errors.csv", "residuals.csv", "manifest.json",
                        "matrices/A.mtx"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "solve");
  CHECK(slurp(dir / "errors.csv").rfind("h,N,Nhat,E_L2,E_H1,Ehat_L2,Ehat_H1,Epsi_D,Epsi_Sigma\n", 0) == 0);
  CHECK(slurp(dir / "residuals.csv").rfind("iter,residual,relative_residual\n", 0) == 0);
  CHECK(slurp(dir / "solution_3d.vtk").find("SCALARS U") != std::string::npos);
}

TEST_CASE("output directory from the environment wins") {
  const fs::path dir = scratch("env");
  CHECK(run("solve --problem tp1 --n 2 --solver coupled -o /nonexistent/never", "OPT3D1D_OUTPUT_DIR=" + dir.string()) ==
        0);
  CHECK(fs::exists(dir / "solution_3d.vtk"));
}

TEST_CASE("config files are read and flags override them") {
  const fs::path dir = scratch("config");
  {
    std::ofstream ini(dir / "run.ini");
    ini << "[problem]\nname = tp2_like\nseed = 3\nsegments = 5\n[mesh]\nn = 3\n[solver]\nkind = opt_direct\n"
        << "[output]\ndir = " << (dir / "out").string() << "\n";
  }
  CHECK(run("solve -c " + (dir / "run.ini").string()) == 0);
  CHECK(fs::exists(dir / "out" / "solution_1d.vtk"));
  CHECK_FALSE(fs::exists(dir / "out" / "errors.csv"));
  CHECK(run("solve -c " + (dir / "run.ini").string() + " --solver coupled -o " + (dir / "flag").string()) == 0);
  CHECK(fs::exists(dir / "flag" / "manifest.json"));
}

TEST_CASE("invalid input maps to exit code 2") {
  const fs::path dir = scratch("invalid");
  {
    std::ofstream ini(dir / "bad.ini");
    ini << "[solver]\nkind = gauss_seidel\n";
  }
  CHECK(run("solve -c " + (dir / "bad.ini").string() + " -o " + dir.string()) == 2);
  {
    std::ofstream ini(dir / "unknown.ini");
    ini << "[solver]\nflavour = strong\n";
  }
  CHECK(run("solve -c " + (dir / "unknown.ini").string() + " -o " + dir.string()) == 2);
  CHECK(run("solve --problem nowhere -o " + dir.string()) == 2);
  CHECK(run("solve --tol -1 -o " + dir.string()) == 2);
  CHECK(run("solve --n abc -o " + dir.string()) == 2);
  CHECK(run("frobnicate") == 2);
  {
    std::ofstream mesh(dir / "bad.mesh");
    mesh << "4 1 0\n0 0 0\n";
  }
  {
    std::ofstream net(dir / "net.txt");
    net << "0 0 0 0 0 1 0.01 1 1 1 N N\n";
  }
  CHECK(run("solve --mesh " + (dir / "bad.mesh").string() + " --network " + (dir / "net.txt").string() + " -o " +
            dir.string()) == 2);
}

TEST_CASE("an iteration cap below what PCG needs gives exit code 3") {
  const fs::path dir = scratch("cap");
  CHECK(run("solve --problem tp2_like --segments 6 --n 4 --tol 1e-12 --max-iter 1 -o " + dir.string()) == 3);
  CHECK(fs::exists(dir / "residuals.csv"));
}

TEST_CASE("custom mesh and network files") {
  const fs::path dir = scratch("custom");
  {
    std::ofstream net(dir / "net.txt");
    net << "-0.5 0 0 0.5 0 0 0.01 1 1 1 D:1 N\n";
  }
  // One cube split into six tets along the main diagonal, no tagged faces.
  {
    std::ofstream mesh(dir / "cube.mesh");
    mesh << "8 6 0\n";
    for (int k = 0; k < 8; ++k) mesh << (k & 1 ? 1 : -1) << ' ' << (k & 2 ? 1 : -1) << ' ' << (k & 4 ? 1 : -1) << '\n';
    mesh << "0 1 3 7\n0 1 5 7\n0 2 3 7\n0 2 6 7\n0 4 5 7\n0 4 6 7\n";
  }
  CHECK(run("solve --mesh " + (dir / "cube.mesh").string() + " --network " + (dir / "net.txt").string() +
            " --solver opt_direct -o " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "solution_3d.vtk"));
}
