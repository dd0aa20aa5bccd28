#include "opt3d1d/trace.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <optional>

namespace opt3d1d {

namespace {

constexpr double kBaryTolerance = 1e-12;

struct TetHit {
  int tet;
  double lo, hi;         // exact clip, used for breakpoints
  double lo_tol, hi_tol; // clip against barycentrics >= -tol, used for ownership
  std::array<double, 4> bary0, slope;
};

// Parameter range of `seg` inside tet t, or nullopt if it misses the tet.
std::optional<TetHit> clip_to_tet(const TetMesh &mesh, int t, const Segment &seg, double length) {
  const auto &v = mesh.tets[t];
  const Vec3 &p0 = mesh.vertices[v[0]];
  Eigen::Matrix3d edges;
  edges.col(0) = mesh.vertices[v[1]] - p0;
  edges.col(1) = mesh.vertices[v[2]] - p0;
  edges.col(2) = mesh.vertices[v[3]] - p0;
  const Eigen::Matrix3d inv = edges.inverse();
  const Vec3 l0 = inv * (seg.a - p0);
  const Vec3 dl = inv * seg.tangent();
  TetHit hit{t, 0.0, length, 0.0, length, {1.0 - l0.sum(), l0(0), l0(1), l0(2)}, {-dl.sum(), dl(0), dl(1), dl(2)}};
  for (int j = 0; j < 4; ++j) {
    const double c = hit.bary0[j], m = hit.slope[j];
    // Barycentric practically constant along the segment: parallel to the face.
    if (std::abs(m) * length < kBaryTolerance) {
      if (c < -kBaryTolerance) return std::nullopt;
      continue;
    }
    // The tolerance only widens the ownership range. Breakpoints use the
    // exact roots, otherwise tol / |m| separates the exit from one tet and
    // the entry into its neighbour when the segment grazes a face.
    const double root = -c / m, root_tol = (-kBaryTolerance - c) / m;
    if (m > 0) {
      hit.lo = std::max(hit.lo, root);
      hit.lo_tol = std::max(hit.lo_tol, root_tol);
    } else {
      hit.hi = std::min(hit.hi, root);
      hit.hi_tol = std::min(hit.hi_tol, root_tol);
    }
  }
  if (hit.hi_tol <= hit.lo_tol) return std::nullopt;
  return hit;
}

} // namespace

const TraceCell &TraceDecomposition::cell_at(double s) const {
  auto it = std::upper_bound(cells.begin(), cells.end(), s,
                             [](double x, const TraceCell &c) { return x < c.interval.hi; });
  if (it == cells.end()) return cells.back();
  return *it;
}

TraceDecomposition trace_segment(const TetMesh &mesh, const Segment &segment, TieBreak tie_break) {
  const double length = segment.length();
  const double tol = mesh.geometric_tolerance();
  const Vec3 seg_lo = segment.a.cwiseMin(segment.b).array() - tol;
  const Vec3 seg_hi = segment.a.cwiseMax(segment.b).array() + tol;

  std::vector<TetHit> hits;
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    const auto &v = mesh.tets[t];
    Vec3 lo = mesh.vertices[v[0]], hi = lo;
    for (int k = 1; k < 4; ++k) {
      lo = lo.cwiseMin(mesh.vertices[v[k]]);
      hi = hi.cwiseMax(mesh.vertices[v[k]]);
    }
    if ((hi.array() < seg_lo.array()).any() || (lo.array() > seg_hi.array()).any()) continue;
    if (auto hit = clip_to_tet(mesh, static_cast<int>(t), segment, length); hit && hit->hi_tol - hit->lo_tol > tol)
      hits.push_back(*hit);
  }

  std::vector<double> raw{0.0, length};
  for (const auto &h : hits) {
    if (h.hi - h.lo <= tol) continue;
    raw.push_back(std::clamp(h.lo, 0.0, length));
    raw.push_back(std::clamp(h.hi, 0.0, length));
  }
  std::sort(raw.begin(), raw.end());
  TraceDecomposition trace;
  trace.segment_id = segment.id;
  for (double s : raw)
    if (trace.breakpoints.empty() || s - trace.breakpoints.back() > tol) trace.breakpoints.push_back(s);
  // The last merged point must be exactly S.
  if (trace.breakpoints.size() == 1) trace.breakpoints.push_back(length);
  trace.breakpoints.back() = length;

  for (std::size_t k = 0; k + 1 < trace.breakpoints.size(); ++k) {
    const Interval iv{trace.breakpoints[k], trace.breakpoints[k + 1]};
    const double mid = 0.5 * (iv.lo + iv.hi);
    const TetHit *owner = nullptr;
    for (const auto &h : hits) {
      if (h.lo_tol - tol > mid || h.hi_tol + tol < mid) continue;
      if (!owner || (tie_break == TieBreak::lowest_index ? h.tet < owner->tet : h.tet > owner->tet)) owner = &h;
    }
    if (!owner)
      throw GeometryError(fmt::format("segment {} leaves the mesh near s = {:.6g}", segment.id, mid));
    trace.cells.push_back({iv, owner->tet, owner->bary0, owner->slope});
  }
  return trace;
}

std::vector<TraceDecomposition> trace_network(const TetMesh &mesh, const SegmentNetwork &network,
                                              TieBreak tie_break) {
  std::vector<TraceDecomposition> traces;
  traces.reserve(network.segments.size());
  for (const auto &seg : network.segments) traces.push_back(trace_segment(mesh, seg, tie_break));
  return traces;
}

const char *to_string(PartitionRole role) {
  switch (role) {
  case PartitionRole::uhat: return "uhat";
  case PartitionRole::psi_d: return "psiD";
  case PartitionRole::psi_sigma: return "psiSigma";
  }
  return "?";
}

int Partition1D::element_at(double s) const {
  auto it = std::upper_bound(nodes.begin() + 1, nodes.end() - 1, s);
  return static_cast<int>(it - nodes.begin()) - 1;
}

Partition1D::Local Partition1D::evaluate(double s) const {
  const int k = element_at(s);
  const double h = nodes[k + 1] - nodes[k];
  const double t = (s - nodes[k]) / h;
  return {k, {1.0 - t, t}, {-1.0 / h, 1.0 / h}};
}

double Partition1D::interpolate(const Vector &values, double s) const {
  const auto loc = evaluate(s);
  return loc.value[0] * values(loc.element) + loc.value[1] * values(loc.element + 1);
}

Partition1D build_partition(const Segment &segment, PartitionRole role, double delta, int crossing_count) {
  if (!(delta > 0.0)) throw std::invalid_argument("build_partition: delta must be positive");
  if (crossing_count < 1) throw std::invalid_argument("build_partition: crossing_count must be >= 1");
  const long count = std::max(2L, std::lround(delta * crossing_count));
  Partition1D p;
  p.segment_id = segment.id;
  p.role = role;
  const double length = segment.length();
  p.nodes.resize(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) p.nodes[k] = length * static_cast<double>(k) / static_cast<double>(count - 1);
  p.nodes.back() = length;
  return p;
}

std::vector<SegmentPartitions> build_partitions(const SegmentNetwork &network,
                                                const std::vector<TraceDecomposition> &traces,
                                                const PartitionDeltas &deltas) {
  std::vector<SegmentPartitions> out;
  out.reserve(network.segments.size());
  for (std::size_t i = 0; i < network.segments.size(); ++i) {
    const auto &seg = network.segments[i];
    const int crossings = std::max(1, traces.at(i).crossing_count());
    out.push_back({build_partition(seg, PartitionRole::uhat, deltas.uhat, crossings),
                   build_partition(seg, PartitionRole::psi_d, deltas.psi_d, crossings),
                   build_partition(seg, PartitionRole::psi_sigma, deltas.psi_sigma, crossings)});
  }
  return out;
}

} // namespace opt3d1d
