#pragma once

#include <array>
#include <filesystem>
#include <string_view>
#include <vector>

#include "opt3d1d/types.hpp"

namespace opt3d1d {

enum class FaceTag { lateral, top, bottom, other };

std::string_view to_string(FaceTag tag);
FaceTag face_tag_from_string(std::string_view name);

struct BoundaryFace {
  std::array<int, 3> vertices;
  FaceTag tag = FaceTag::other;
};

struct BoundingBox {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  double diagonal() const { return (hi - lo).norm(); }
  double volume() const { return (hi - lo).prod(); }
  bool contains(const Vec3 &p, double tol = 0.0) const {
    return (p.array() >= lo.array() - tol).all() && (p.array() <= hi.array() + tol).all();
  }
};

/// Conforming P1 tetrahedral mesh. Tets are stored positively oriented.
struct TetMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<BoundaryFace> boundary_faces;
  double h = 0.0; // max edge length over all tets

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_tets() const { return tets.size(); }
  double tet_volume(std::size_t t) const;
  BoundingBox bounding_box() const;
  /// Point-coincidence tolerance: 1e-12 times the bounding-box diagonal.
  double geometric_tolerance() const { return 1e-12 * bounding_box().diagonal(); }
};

double signed_volume(const Vec3 &a, const Vec3 &b, const Vec3 &c, const Vec3 &d);

/// Builds a mesh from raw parts: orients tets positively, checks face
/// incidence (<= 2 tets per face, boundary faces used by exactly one tet)
/// and computes h. Throws ValidationError.
TetMesh make_tet_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets,
                      std::vector<BoundaryFace> boundary_faces);

/// Structured mesh of the box [lo, hi] with n cells per axis, each cell
/// split into six tetrahedra sharing the main diagonal (Kuhn split).
/// Boundary faces are tagged bottom/top for -z/+z normals, lateral otherwise.
TetMesh build_box_mesh(int n, const Vec3 &lo, const Vec3 &hi);

/// ASCII format: `nv nt nf`, then nv lines `x y z`, nt lines `v0 v1 v2 v3`,
/// nf lines `v0 v1 v2 tag`.
TetMesh load_mesh(const std::filesystem::path &path);
void save_mesh(const TetMesh &mesh, const std::filesystem::path &path);
TetMesh parse_mesh(std::string_view text);
std::string format_mesh(const TetMesh &mesh);

} // namespace opt3d1d
