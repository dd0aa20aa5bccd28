#include "opt3d1d/assembly.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "opt3d1d/quadrature.hpp"

namespace opt3d1d {

Discretization discretize(TetMesh mesh, SegmentNetwork network, const PartitionDeltas &deltas, TieBreak tie_break) {
  for (const auto &seg : network.segments) validate_segment(seg);
  Discretization d;
  d.traces = trace_network(mesh, network, tie_break);
  d.partitions = build_partitions(network, d.traces, deltas);
  d.mesh = std::move(mesh);
  d.network = std::move(network);
  d.deltas = deltas;
  return d;
}

namespace {

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet> &t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end()); // duplicates are summed
  m.makeCompressed();
  return m;
}

SparseMatrix selection(const std::vector<int> &picked, int num_all) {
  std::vector<Triplet> t;
  t.reserve(picked.size());
  for (std::size_t i = 0; i < picked.size(); ++i) t.emplace_back(static_cast<int>(i), picked[i], 1.0);
  return from_triplets(static_cast<Eigen::Index>(picked.size()), num_all, t);
}

struct LineSample {
  double s;
  double w;
  std::array<int, 4> verts;
  std::array<double, 4> phi;
  Partition1D::Local uhat, psi_d, psi_sigma;
};

// Composite 3-point Gauss over the union of the trace breakpoints and (when
// given) all three partitions of the segment.
template <typename Fn>
void for_each_line_sample(const TetMesh &mesh, const Segment &seg, const TraceDecomposition &trace,
                          const SegmentPartitions *parts, Fn &&fn) {
  std::vector<std::vector<double>> lists{trace.breakpoints};
  if (parts) {
    lists.push_back(parts->uhat.nodes);
    lists.push_back(parts->psi_d.nodes);
    lists.push_back(parts->psi_sigma.nodes);
  }
  const auto cells = composite_rule(lists, 3, mesh.geometric_tolerance());
  for (const auto &cell : cells) {
    const TraceCell &tc = trace.cell_at(0.5 * (cell.interval.lo + cell.interval.hi));
    for (const auto &q : cell.points) {
      LineSample sample{q.x, q.w, mesh.tets[tc.tet], tc.barycentric(q.x), {}, {}, {}};
      if (parts) {
        sample.uhat = parts->uhat.evaluate(q.x);
        sample.psi_d = parts->psi_d.evaluate(q.x);
        sample.psi_sigma = parts->psi_sigma.evaluate(q.x);
      }
      fn(sample);
    }
  }
  (void)seg;
}

} // namespace

Vector DofMap3D::expand(const Vector &free) const {
  Vector all = lift;
  for (int i = 0; i < num_free(); ++i) all(vertex_of_free[i]) = free(i);
  return all;
}

Vector HatDofMap::expand(const Vector &free) const {
  Vector all = lift;
  for (int i = 0; i < num_free(); ++i) all(node_of_free[i]) = free(i);
  return all;
}

DofMap3D make_dof_map_3d(const TetMesh &mesh, const BulkData &bulk) {
  const int nv = static_cast<int>(mesh.num_vertices());
  DofMap3D map;
  map.lift = Vector::Zero(nv);
  std::vector<char> dirichlet(nv, 0);
  for (const auto &face : mesh.boundary_faces) {
    const auto *d = std::get_if<DirichletData>(&bulk.on(face.tag));
    if (!d) continue;
    for (int v : face.vertices) {
      if (!dirichlet[v]) map.lift(v) = d->value(mesh.vertices[v]);
      dirichlet[v] = 1;
    }
  }
  map.free_of_vertex.assign(nv, -1);
  for (int v = 0; v < nv; ++v)
    if (!dirichlet[v]) {
      map.free_of_vertex[v] = static_cast<int>(map.vertex_of_free.size());
      map.vertex_of_free.push_back(v);
    }
  map.restriction = selection(map.vertex_of_free, nv);
  return map;
}

HatDofMap make_hat_dof_map(const SegmentNetwork &network, const std::vector<SegmentPartitions> &partitions) {
  HatDofMap map;
  int total = 0;
  for (const auto &p : partitions) {
    map.node_offset.push_back(total);
    total += p.uhat.size();
  }
  map.lift = Vector::Zero(total);
  map.free_of_node.assign(total, -1);
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const auto &seg = network.segments[i];
    const int count = partitions[i].uhat.size();
    for (int k = 0; k < count; ++k) {
      const int node = map.node_offset[i] + k;
      const EndpointBc *bc = k == 0 ? &seg.endpoint_bc[0] : (k == count - 1 ? &seg.endpoint_bc[1] : nullptr);
      if (bc) {
        if (const auto *d = std::get_if<Dirichlet>(bc)) {
          map.lift(node) = d->value;
          continue;
        }
      }
      map.free_of_node[node] = static_cast<int>(map.node_of_free.size());
      map.node_of_free.push_back(node);
    }
  }
  map.restriction = selection(map.node_of_free, total);
  return map;
}

InterfaceDofMap make_interface_dof_map(const std::vector<SegmentPartitions> &partitions) {
  InterfaceDofMap map;
  for (const auto &p : partitions) {
    map.offset_d.push_back(map.num_d);
    map.offset_sigma.push_back(map.num_sigma);
    map.num_d += p.psi_d.size();
    map.num_sigma += p.psi_sigma.size();
  }
  return map;
}

SparseMatrix assemble_stiffness(const TetMesh &mesh, double conductivity) {
  std::vector<Triplet> t;
  t.reserve(16 * mesh.num_tets());
  for (std::size_t e = 0; e < mesh.num_tets(); ++e) {
    const auto &v = mesh.tets[e];
    const double vol = mesh.tet_volume(e);
    if (!(vol > 0.0)) throw AssemblyError(fmt::format("tet {} has non-positive volume {:.3e}", e, vol));
    Eigen::Matrix3d edges;
    for (int k = 0; k < 3; ++k) edges.col(k) = mesh.vertices[v[k + 1]] - mesh.vertices[v[0]];
    const Eigen::Matrix3d inv = edges.inverse(); // rows: gradients of bary 1..3
    std::array<Vec3, 4> grad;
    for (int k = 0; k < 3; ++k) grad[k + 1] = inv.row(k).transpose();
    grad[0] = -(grad[1] + grad[2] + grad[3]);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) t.emplace_back(v[i], v[j], conductivity * vol * grad[i].dot(grad[j]));
  }
  const auto nv = static_cast<Eigen::Index>(mesh.num_vertices());
  return from_triplets(nv, nv, t);
}

SparseMatrix assemble_trace_mass(const TetMesh &mesh, const SegmentNetwork &network,
                                 const std::vector<TraceDecomposition> &traces) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < network.segments.size(); ++i) {
    const auto &seg = network.segments[i];
    for_each_line_sample(mesh, seg, traces[i], nullptr, [&](const LineSample &q) {
      const double c = q.w * seg.beta * seg.perimeter(q.s);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) t.emplace_back(q.verts[a], q.verts[b], c * q.phi[a] * q.phi[b]);
    });
  }
  const auto nv = static_cast<Eigen::Index>(mesh.num_vertices());
  return from_triplets(nv, nv, t);
}

AssembledA assemble_A(const TetMesh &mesh, const SegmentNetwork &network,
                      const std::vector<TraceDecomposition> &traces, const BulkData &bulk) {
  if (!(bulk.conductivity > 0.0)) throw std::invalid_argument("assemble_A: conductivity must be positive");
  AssembledA out;
  out.full = assemble_stiffness(mesh, bulk.conductivity) + assemble_trace_mass(mesh, network, traces);
  out.dofs = make_dof_map_3d(mesh, bulk);
  const SparseMatrix &P = out.dofs.restriction;
  out.reduced = P * out.full * SparseMatrix(P.transpose());
  out.lift_rhs = -(P * (out.full * out.dofs.lift));
  return out;
}

AssembledAhat assemble_Ahat(const SegmentNetwork &network, const std::vector<SegmentPartitions> &partitions) {
  AssembledAhat out;
  out.dofs = make_hat_dof_map(network, partitions);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < network.segments.size(); ++i) {
    const auto &seg = network.segments[i];
    const auto &part = partitions[i].uhat;
    const int off = out.dofs.node_offset[i];
    const auto cells = composite_rule(std::span(&part.nodes, 1), 3);
    for (const auto &cell : cells)
      for (const auto &q : cell.points) {
        const auto loc = part.evaluate(q.x);
        const double stiff = q.w * seg.ktilde(q.x) * seg.area(q.x);
        const double mass = q.w * seg.beta * seg.perimeter(q.x);
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            t.emplace_back(off + loc.element + a, off + loc.element + b,
                           stiff * loc.slope[a] * loc.slope[b] + mass * loc.value[a] * loc.value[b]);
      }
  }
  const int n_all = out.dofs.num_all();
  out.full = from_triplets(n_all, n_all, t);
  const SparseMatrix &P = out.dofs.restriction;
  out.sharp = P * out.full * SparseMatrix(P.transpose());
  out.lift_rhs = -(P * (out.full * out.dofs.lift));

  // Pairwise chains e1 = e2, e2 = e3, ... per junction.
  std::vector<Triplet> q;
  int row = 0;
  for (std::size_t j = 0; j < network.junctions.size(); ++j) {
    const auto &ends = network.junctions[j].ends;
    std::vector<int> dofs;
    for (const auto &e : ends) {
      const int count = partitions.at(e.segment).uhat.size();
      if (e.end == Endpoint::interior)
        throw AssemblyError(fmt::format("junction {} references an interior point; split the network first", j));
      const int node = out.dofs.node_offset[e.segment] + (e.end == Endpoint::start ? 0 : count - 1);
      const int dof = out.dofs.free_of_node[node];
      if (dof < 0) throw AssemblyError(fmt::format("junction {} references a Dirichlet endpoint", j));
      dofs.push_back(dof);
    }
    for (std::size_t k = 0; k + 1 < dofs.size(); ++k) {
      q.emplace_back(row, dofs[k], 1.0);
      q.emplace_back(row, dofs[k + 1], -1.0);
      ++row;
    }
  }
  out.Q = from_triplets(row, out.dofs.num_free(), q);
  return out;
}

CouplingBlocks assemble_coupling(const TetMesh &mesh, const SegmentNetwork &network,
                                 const std::vector<TraceDecomposition> &traces,
                                 const std::vector<SegmentPartitions> &partitions) {
  const HatDofMap hat = make_hat_dof_map(network, partitions);
  const InterfaceDofMap psi = make_interface_dof_map(partitions);
  std::vector<Triplet> dhat_beta, s_beta, d, shat, g, ghat, md, ms;
  for (std::size_t i = 0; i < network.segments.size(); ++i) {
    const auto &seg = network.segments[i];
    const int oh = hat.node_offset[i], od = psi.offset_d[i], os = psi.offset_sigma[i];
    for_each_line_sample(mesh, seg, traces[i], &partitions[i], [&](const LineSample &q) {
      const double bg = seg.beta * seg.perimeter(q.s);
      const int eh = oh + q.uhat.element, ed = od + q.psi_d.element, es = os + q.psi_sigma.element;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double hd = q.w * q.uhat.value[a] * q.psi_d.value[b];
          dhat_beta.emplace_back(eh + a, ed + b, bg * hd);
          shat.emplace_back(eh + a, es + b, q.w * q.uhat.value[a] * q.psi_sigma.value[b]);
          ghat.emplace_back(eh + a, eh + b, q.w * q.uhat.value[a] * q.uhat.value[b]);
          md.emplace_back(ed + a, ed + b, q.w * q.psi_d.value[a] * q.psi_d.value[b]);
          ms.emplace_back(es + a, es + b, q.w * q.psi_sigma.value[a] * q.psi_sigma.value[b]);
        }
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 2; ++b) {
          s_beta.emplace_back(q.verts[a], es + b, bg * q.w * q.phi[a] * q.psi_sigma.value[b]);
          d.emplace_back(q.verts[a], ed + b, q.w * q.phi[a] * q.psi_d.value[b]);
        }
        for (int b = 0; b < 4; ++b) g.emplace_back(q.verts[a], q.verts[b], q.w * q.phi[a] * q.phi[b]);
      }
    });
  }
  const auto nv = static_cast<Eigen::Index>(mesh.num_vertices());
  const int nh = hat.num_all();
  CouplingBlocks out;
  out.Dhat_beta = from_triplets(nh, psi.num_d, dhat_beta);
  out.S_beta = from_triplets(nv, psi.num_sigma, s_beta);
  out.D = from_triplets(nv, psi.num_d, d);
  out.Shat = from_triplets(nh, psi.num_sigma, shat);
  out.G = from_triplets(nv, nv, g);
  out.Ghat = from_triplets(nh, nh, ghat);
  out.MD = from_triplets(psi.num_d, psi.num_d, md);
  out.MSigma = from_triplets(psi.num_sigma, psi.num_sigma, ms);
  return out;
}

LoadVectors assemble_rhs(const TetMesh &mesh, const SegmentNetwork &network,
                         const std::vector<TraceDecomposition> &traces,
                         const std::vector<SegmentPartitions> &partitions, const BulkData &bulk) {
  (void)traces;
  LoadVectors out;
  out.bulk = Vector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t e = 0; e < mesh.num_tets(); ++e) {
    const auto &v = mesh.tets[e];
    const double vol = mesh.tet_volume(e);
    for (const auto &q : tet_rule_degree2()) {
      Vec3 x = Vec3::Zero();
      for (int k = 0; k < 4; ++k) x += q.bary[k] * mesh.vertices[v[k]];
      const double fx = bulk.source(x) * q.w * vol;
      for (int k = 0; k < 4; ++k) out.bulk(v[k]) += fx * q.bary[k];
    }
  }
  for (const auto &face : mesh.boundary_faces) {
    const auto *neumann = std::get_if<NeumannData>(&bulk.on(face.tag));
    if (!neumann) continue;
    const auto &v = face.vertices;
    const Vec3 &p0 = mesh.vertices[v[0]], &p1 = mesh.vertices[v[1]], &p2 = mesh.vertices[v[2]];
    const double area = 0.5 * (p1 - p0).cross(p2 - p0).norm();
    for (const auto &q : triangle_rule_degree2()) {
      const Vec3 x = q.bary[0] * p0 + q.bary[1] * p1 + q.bary[2] * p2;
      const double hx = neumann->flux(x) * q.w * area;
      for (int k = 0; k < 3; ++k) out.bulk(v[k]) += hx * q.bary[k];
    }
  }

  const HatDofMap hat = make_hat_dof_map(network, partitions);
  out.segment = Vector::Zero(hat.num_all());
  for (std::size_t i = 0; i < network.segments.size(); ++i) {
    const auto &seg = network.segments[i];
    const auto &part = partitions[i].uhat;
    for (const auto &cell : composite_rule(std::span(&part.nodes, 1), 3))
      for (const auto &q : cell.points) {
        const auto loc = part.evaluate(q.x);
        const double c = q.w * seg.area(q.x) * seg.gbar(q.x);
        for (int a = 0; a < 2; ++a) out.segment(hat.node_offset[i] + loc.element + a) += c * loc.value[a];
      }
  }
  return out;
}

SparseMatrix assemble_B(const TetMesh &mesh, const SegmentNetwork &network,
                        const std::vector<TraceDecomposition> &traces,
                        const std::vector<SegmentPartitions> &partitions, bool weighted) {
  const HatDofMap hat = make_hat_dof_map(network, partitions);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < network.segments.size(); ++i) {
    const auto &seg = network.segments[i];
    const int oh = hat.node_offset[i];
    for_each_line_sample(mesh, seg, traces[i], &partitions[i], [&](const LineSample &q) {
      const double c = q.w * (weighted ? seg.beta * seg.perimeter(q.s) : 1.0);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 2; ++b) t.emplace_back(q.verts[a], oh + q.uhat.element + b, c * q.phi[a] * q.uhat.value[b]);
    });
  }
  return from_triplets(static_cast<Eigen::Index>(mesh.num_vertices()), hat.num_all(), t);
}

SparseMatrix BlockSystem::Ahat() const {
  const int n = Nhat(), m = num_multipliers();
  std::vector<Triplet> t;
  for (int k = 0; k < Ahat_sharp.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(Ahat_sharp, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < Q.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(Q, k); it; ++it) {
      t.emplace_back(n + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), n + it.row(), it.value());
    }
  return from_triplets(n + m, n + m, t);
}

SparseMatrix BlockSystem::pad_hat_rows(const SparseMatrix &m) const {
  SparseMatrix out = m;
  out.conservativeResize(m.rows() + num_multipliers(), m.cols());
  return out;
}

Vector BlockSystem::pad_hat(const Vector &v) const {
  Vector out = Vector::Zero(v.size() + num_multipliers());
  out.head(v.size()) = v;
  return out;
}

BlockSystem assemble_system(const Discretization &disc, const BulkData &bulk) {
  const auto &mesh = disc.mesh;
  const auto &net = disc.network;
  BlockSystem sys;

  auto a = assemble_A(mesh, net, disc.traces, bulk);
  auto ahat = assemble_Ahat(net, disc.partitions);
  auto coupling = assemble_coupling(mesh, net, disc.traces, disc.partitions);
  auto load = assemble_rhs(mesh, net, disc.traces, disc.partitions, bulk);

  sys.dofs = std::move(a.dofs);
  sys.hat = std::move(ahat.dofs);
  sys.psi = make_interface_dof_map(disc.partitions);

  const SparseMatrix &P = sys.dofs.restriction;
  const SparseMatrix &Ph = sys.hat.restriction;
  const SparseMatrix Pt = P.transpose(), Pht = Ph.transpose();
  const Vector &u_lift = sys.dofs.lift;
  const Vector &uh_lift = sys.hat.lift;

  sys.A = a.reduced;
  sys.Ahat_sharp = ahat.sharp;
  sys.Q = ahat.Q;
  sys.Dhat_beta = Ph * coupling.Dhat_beta;
  sys.S_beta = P * coupling.S_beta;
  sys.G = P * coupling.G * Pt;
  sys.Ghat = Ph * coupling.Ghat * Pht;
  sys.MD = coupling.MD;
  sys.MSigma = coupling.MSigma;
  sys.D = P * coupling.D;
  sys.Shat = Ph * coupling.Shat;

  SparseMatrix b_full = assemble_B(mesh, net, disc.traces, disc.partitions, false);
  SparseMatrix bb_full = assemble_B(mesh, net, disc.traces, disc.partitions, true);
  sys.B = P * b_full * Pht;
  sys.B_beta = P * bb_full * Pht;

  sys.f = P * load.bulk + a.lift_rhs;
  sys.g = Ph * load.segment + ahat.lift_rhs;

  auto &lift = sys.lift;
  lift.G_u = P * (coupling.G * u_lift);
  lift.D_u = coupling.D.transpose() * u_lift;
  lift.Ghat_u = Ph * (coupling.Ghat * uh_lift);
  lift.Shat_u = coupling.Shat.transpose() * uh_lift;
  lift.c_u = u_lift.dot(coupling.G * u_lift);
  lift.c_uhat = uh_lift.dot(coupling.Ghat * uh_lift);
  lift.coupled_f = P * (bb_full * uh_lift);
  lift.coupled_g = Ph * (bb_full.transpose() * u_lift);

  sys.full.stiffness = assemble_stiffness(mesh, bulk.conductivity);
  sys.full.trace_mass = a.full - sys.full.stiffness;
  sys.full.A = std::move(a.full);
  sys.full.Ahat = std::move(ahat.full);
  sys.full.coupling = std::move(coupling);
  sys.full.B = std::move(b_full);
  sys.full.B_beta = std::move(bb_full);
  sys.full.load = std::move(load);
  return sys;
}

std::string to_matrix_market(const SparseMatrix &m) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += fmt::format("{} {} {}\n", m.rows(), m.cols(), m.nonZeros());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      out += fmt::format("{} {} {:.17g}\n", it.row() + 1, it.col() + 1, it.value());
  return out;
}

} // namespace opt3d1d
