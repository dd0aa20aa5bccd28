#include "opt3d1d/geom.hpp"

#include <algorithm>
#include <map>

namespace opt3d1d {

std::string_view to_string(FaceTag tag) {
  switch (tag) {
  case FaceTag::lateral: return "lateral";
  case FaceTag::top: return "top";
  case FaceTag::bottom: return "bottom";
  case FaceTag::other: return "other";
  }
  return "other";
}

FaceTag face_tag_from_string(std::string_view name) {
  if (name == "lateral") return FaceTag::lateral;
  if (name == "top") return FaceTag::top;
  if (name == "bottom") return FaceTag::bottom;
  if (name == "other") return FaceTag::other;
  throw std::invalid_argument("unknown face tag '" + std::string(name) + "'");
}

double signed_volume(const Vec3 &a, const Vec3 &b, const Vec3 &c, const Vec3 &d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

double TetMesh::tet_volume(std::size_t t) const {
  const auto &v = tets[t];
  return signed_volume(vertices[v[0]], vertices[v[1]], vertices[v[2]], vertices[v[3]]);
}

BoundingBox TetMesh::bounding_box() const {
  BoundingBox box;
  if (vertices.empty()) return box;
  box.lo = box.hi = vertices.front();
  for (const auto &p : vertices) {
    box.lo = box.lo.cwiseMin(p);
    box.hi = box.hi.cwiseMax(p);
  }
  return box;
}

namespace {

using FaceKey = std::array<int, 3>;

FaceKey sorted_face(int a, int b, int c) {
  FaceKey k{a, b, c};
  std::sort(k.begin(), k.end());
  return k;
}

constexpr std::array<std::array<int, 3>, 4> kTetFaces = {{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

} // namespace

TetMesh make_tet_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets,
                      std::vector<BoundaryFace> boundary_faces) {
  TetMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.tets = std::move(tets);
  mesh.boundary_faces = std::move(boundary_faces);

  const int nv = static_cast<int>(mesh.vertices.size());
  double scale = mesh.bounding_box().diagonal();
  std::map<FaceKey, int> incidence;
  double h = 0.0;
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    auto &tet = mesh.tets[t];
    for (int v : tet)
      if (v < 0 || v >= nv)
        throw ValidationError("tet " + std::to_string(t) + " references vertex " + std::to_string(v) +
                              " out of range");
    double vol = mesh.tet_volume(t);
    if (std::abs(vol) <= 1e-14 * scale * scale * scale)
      throw ValidationError("tet " + std::to_string(t) + " is degenerate");
    if (vol < 0) std::swap(tet[2], tet[3]);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        h = std::max(h, (mesh.vertices[tet[i]] - mesh.vertices[tet[j]]).norm());
    for (const auto &f : kTetFaces) {
      int count = ++incidence[sorted_face(tet[f[0]], tet[f[1]], tet[f[2]])];
      if (count > 2)
        throw ValidationError("face shared by more than two tets (tet " + std::to_string(t) + ")");
    }
  }
  for (const auto &bf : mesh.boundary_faces) {
    for (int v : bf.vertices)
      if (v < 0 || v >= nv) throw ValidationError("boundary face references vertex out of range");
    auto it = incidence.find(sorted_face(bf.vertices[0], bf.vertices[1], bf.vertices[2]));
    if (it == incidence.end() || it->second != 1)
      throw ValidationError("boundary face is not a face of exactly one tet");
  }
  mesh.h = h;
  return mesh;
}

TetMesh build_box_mesh(int n, const Vec3 &lo, const Vec3 &hi) {
  if (n < 1) throw std::invalid_argument("build_box_mesh: n must be >= 1");
  if (!((hi.array() > lo.array()).all())) throw std::invalid_argument("build_box_mesh: hi must exceed lo");

  const int np = n + 1;
  auto vid = [np](int i, int j, int k) { return i + np * (j + np * k); };
  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(np) * np * np);
  const Vec3 step = (hi - lo) / n;
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        // Snap the last layer to hi so boundary coordinates are exact.
        Vec3 p(i == n ? hi.x() : lo.x() + i * step.x(), j == n ? hi.y() : lo.y() + j * step.y(),
               k == n ? hi.z() : lo.z() + k * step.z());
        vertices.push_back(p);
      }

  // Six monotone lattice paths from corner 000 to 111.
  static constexpr std::array<std::array<int, 3>, 6> kPerms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> tets;
  tets.reserve(6 * static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto &perm : kPerms) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> tet{};
          tet[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[perm[s]];
            tet[s + 1] = vid(c[0], c[1], c[2]);
          }
          tets.push_back(tet);
        }

  std::vector<BoundaryFace> faces;
  auto add_quad = [&](int a, int b, int c, int d, FaceTag tag) {
    // Kuhn tets split each boundary quad along the diagonal through the
    // lattice-minimal corner a and the maximal corner c.
    faces.push_back({{a, b, c}, tag});
    faces.push_back({{a, c, d}, tag});
  };
  for (int q = 0; q < n; ++q)
    for (int p = 0; p < n; ++p) {
      // z = lo / hi
      add_quad(vid(p, q, 0), vid(p + 1, q, 0), vid(p + 1, q + 1, 0), vid(p, q + 1, 0), FaceTag::bottom);
      add_quad(vid(p, q, n), vid(p + 1, q, n), vid(p + 1, q + 1, n), vid(p, q + 1, n), FaceTag::top);
      // x = lo / hi  (p along y, q along z)
      add_quad(vid(0, p, q), vid(0, p + 1, q), vid(0, p + 1, q + 1), vid(0, p, q + 1), FaceTag::lateral);
      add_quad(vid(n, p, q), vid(n, p + 1, q), vid(n, p + 1, q + 1), vid(n, p, q + 1), FaceTag::lateral);
      // y = lo / hi  (p along x, q along z)
      add_quad(vid(p, 0, q), vid(p + 1, 0, q), vid(p + 1, 0, q + 1), vid(p, 0, q + 1), FaceTag::lateral);
      add_quad(vid(p, n, q), vid(p + 1, n, q), vid(p + 1, n, q + 1), vid(p, n, q + 1), FaceTag::lateral);
    }
  return make_tet_mesh(std::move(vertices), std::move(tets), std::move(faces));
}

} // namespace opt3d1d
