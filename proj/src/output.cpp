#include "opt3d1d/output.hpp"

#include <fmt/format.h>

#include <fstream>
#include <algorithm>

namespace opt3d1d {

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string vtk_bulk(const TetMesh &mesh, const Vector &u_all) {
  if (u_all.size() != static_cast<Eigen::Index>(mesh.num_vertices()))
    throw std::invalid_argument("vtk_bulk: field size does not match the mesh");
  std::string out = "# vtk DataFile Version 3.0\nbulk solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out += fmt::format("POINTS {} double\n", mesh.num_vertices());
  for (const auto &p : mesh.vertices) out += fmt::format("{:.17g} {:.17g} {:.17g}\n", p.x(), p.y(), p.z());
  out += fmt::format("CELLS {} {}\n", mesh.num_tets(), 5 * mesh.num_tets());
  for (const auto &t : mesh.tets) out += fmt::format("4 {} {} {} {}\n", t[0], t[1], t[2], t[3]);
  out += fmt::format("CELL_TYPES {}\n", mesh.num_tets());
  for (std::size_t i = 0; i < mesh.num_tets(); ++i) out += "10\n";
  out += fmt::format("POINT_DATA {}\nSCALARS U double 1\nLOOKUP_TABLE default\n", mesh.num_vertices());
  for (Eigen::Index i = 0; i < u_all.size(); ++i) out += fmt_double(u_all(i)) + "\n";
  return out;
}

std::string vtk_network(const Discretization &disc, const BlockSystem &sys, const Solution &sol) {
  const Vector uhat = sys.hat.expand(sol.Uhat);
  const double tol = disc.mesh.geometric_tolerance();
  std::vector<Vec3> points;
  std::vector<std::array<double, 3>> data;
  std::vector<std::vector<int>> lines;
  for (std::size_t i = 0; i < disc.network.segments.size(); ++i) {
    const auto &seg = disc.network.segments[i];
    const auto &p = disc.partitions[i];
    std::vector<double> s;
    for (const auto *nodes : {&p.uhat.nodes, &p.psi_d.nodes, &p.psi_sigma.nodes}) s.insert(s.end(), nodes->begin(), nodes->end());
    std::sort(s.begin(), s.end());
    std::vector<double> merged;
    for (double x : s)
      if (merged.empty() || x - merged.back() > tol) merged.push_back(x);
    const Vector vh = sys.hat.segment_values(uhat, static_cast<int>(i), p.uhat.size());
    const Vector vd = sol.psi_d.segment(sys.psi.offset_d[i], p.psi_d.size());
    const Vector vs = sol.psi_sigma.segment(sys.psi.offset_sigma[i], p.psi_sigma.size());
    std::vector<int> line;
    for (double x : merged) {
      line.push_back(static_cast<int>(points.size()));
      points.push_back(seg.point(x));
      data.push_back({p.uhat.interpolate(vh, x), p.psi_d.interpolate(vd, x), p.psi_sigma.interpolate(vs, x)});
    }
    lines.push_back(std::move(line));
  }
  std::size_t entries = 0;
  for (const auto &l : lines) entries += l.size() + 1;
  std::string out = "# vtk DataFile Version 3.0\nnetwork solution\nASCII\nDATASET POLYDATA\n";
  out += fmt::format("POINTS {} double\n", points.size());
  for (const auto &p : points) out += fmt::format("{:.17g} {:.17g} {:.17g}\n", p.x(), p.y(), p.z());
  out += fmt::format("LINES {} {}\n", lines.size(), entries);
  for (const auto &l : lines) {
    out += std::to_string(l.size());
    for (int k : l) out += " " + std::to_string(k);
    out += "\n";
  }
  out += fmt::format("POINT_DATA {}\n", points.size());
  const char *names[] = {"Uhat", "PsiD", "PsiSigma"};
  for (int f = 0; f < 3; ++f) {
    out += fmt::format("SCALARS {} double 1\nLOOKUP_TABLE default\n", names[f]);
    for (const auto &d : data) out += fmt_double(d[f]) + "\n";
  }
  return out;
}

std::string errors_csv(const std::vector<ErrorReport> &rows) {
  std::string out = "h,N,Nhat,E_L2,E_H1,Ehat_L2,Ehat_H1,Epsi_D,Epsi_Sigma\n";
  for (const auto &r : rows)
    out += fmt::format("{:.17g},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.h, r.N, r.Nhat, r.E_L2,
                       r.E_H1, r.Ehat_L2, r.Ehat_H1, r.Epsi_D, r.Epsi_Sigma);
  return out;
}

std::string residual_csv(const PcgReport &report) {
  std::string out = "iter,residual,relative_residual\n";
  for (std::size_t k = 0; k < report.residuals.size(); ++k) {
    const double r = report.residuals[k];
    out += fmt::format("{},{:.17g},{:.17g}\n", k, r, report.d_norm > 0.0 ? r / report.d_norm : 0.0);
  }
  return out;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

} // namespace opt3d1d
