#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "opt3d1d/analysis.hpp"
#include "opt3d1d/optsolver.hpp"

namespace opt3d1d {

/// Legacy ASCII VTK unstructured grid of tets with point data `U`.
std::string vtk_bulk(const TetMesh &mesh, const Vector &u_all);

/// Legacy ASCII VTK poly-lines, one per segment, through the union of the
/// three partitions' nodes, with point data `Uhat`, `PsiD`, `PsiSigma`.
std::string vtk_network(const Discretization &disc, const BlockSystem &sys, const Solution &sol);

/// `h,N,Nhat,E_L2,E_H1,Ehat_L2,Ehat_H1,Epsi_D,Epsi_Sigma`, one row per report.
std::string errors_csv(const std::vector<ErrorReport> &rows);

/// `iter,residual,relative_residual`.
std::string residual_csv(const PcgReport &report);

/// Writes `text` to `path`, creating parent directories. Throws std::runtime_error.
void write_text(const std::filesystem::path &path, const std::string &text);

/// 17 significant digits, used for every number written to an artifact.
std::string fmt_double(double v);

} // namespace opt3d1d
