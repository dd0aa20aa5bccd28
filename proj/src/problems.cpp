#include "opt3d1d/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace opt3d1d {

TetMesh TestProblem::mesh(int n) const { return fixed_mesh ? *fixed_mesh : build_box_mesh(n, box.lo, box.hi); }

Discretization TestProblem::discretize(int n, const PartitionDeltas &deltas) const {
  return opt3d1d::discretize(mesh(n), network, deltas);
}

namespace {

const BoundingBox kCube{Vec3::Constant(-1.0), Vec3::Constant(1.0)};

// Two unit vectors completing the segment tangent to an orthonormal frame.
std::pair<Vec3, Vec3> normal_frame(const Vec3 &t) {
  Eigen::Index k;
  t.cwiseAbs().minCoeff(&k);
  const Vec3 e1 = t.cross(Vec3::Unit(k)).normalized();
  return {e1, t.cross(e1)};
}

template <typename F> double central_derivative(F &&f, double h) {
  return (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h);
}

void assign_segment_data(SegmentNetwork &net, double radius, double beta, double ktilde, double gbar,
                         double inlet_value) {
  for (auto &seg : net.segments) {
    seg.radius = radius;
    seg.beta = beta;
    seg.conductivity_tilde = constant_field(ktilde);
    seg.source_gbar = constant_field(gbar);
    for (auto &bc : seg.endpoint_bc)
      if (std::holds_alternative<Dirichlet>(bc)) bc = Dirichlet{inlet_value};
  }
}

} // namespace

TestProblem tp1() {
  constexpr double R = 1e-2;
  TestProblem p;
  p.name = "tp1";
  p.box = kCube;

  Segment seg;
  seg.a = Vec3(0.0, 0.0, -1.0);
  seg.b = Vec3(0.0, 0.0, 1.0);
  seg.radius = R;
  seg.beta = 2.0 * R / (2.0 + R * R);
  seg.conductivity_tilde = [](const Vec3 &x) { return x.z() * x.z() / 3.0 + 0.5; };
  seg.source_gbar = constant_field(3.0);
  seg.endpoint_bc = {Dirichlet{1.0}, Dirichlet{1.0}};
  p.network.segments.push_back(seg);

  auto u = [](const Vec3 &x) { return 0.5 * (x.x() * x.x() + x.y() * x.y()) * (x.z() * x.z() - 1.0) + 1.0; };
  p.bulk.conductivity = 1.0;
  p.bulk.source = [](const Vec3 &x) { return 2.0 - x.x() * x.x() - x.y() * x.y() - 2.0 * x.z() * x.z(); };
  p.bulk.set(FaceTag::lateral, DirichletData{u});
  // K du/dn on z = +-1 with the outward normal: (x^2 + y^2) on both faces.
  const ScalarField cap_flux = [](const Vec3 &x) { return x.x() * x.x() + x.y() * x.y(); };
  p.bulk.set(FaceTag::top, NeumannData{cap_flux});
  p.bulk.set(FaceTag::bottom, NeumannData{cap_flux});

  ExactSolution ex;
  ex.u = u;
  ex.grad_u = [](const Vec3 &x) {
    const double r2 = x.x() * x.x() + x.y() * x.y(), c = x.z() * x.z() - 1.0;
    return Vec3(x.x() * c, x.y() * c, r2 * x.z());
  };
  ex.uhat = [](const Vec3 &x) { return 2.0 - x.z() * x.z(); };
  ex.duhat_ds = [](const Segment &s, double t) { return -2.0 * s.point(t).z() * s.tangent().z(); };
  ex.u_check = [u](const Segment &s, double t) {
    const auto [e1, e2] = normal_frame(s.tangent());
    (void)e2;
    return u(s.point(t) + s.radius * e1);
  };
  p.exact = std::move(ex);
  return p;
}

TestProblem tp2_like(std::uint64_t seed, int count) {
  TestProblem p;
  p.name = "tp2_like";
  p.box = kCube;
  p.network = generate_random_network(count, p.box, 0.3, seed);
  assign_segment_data(p.network, 1e-2, 5e-2, 100.0, 100.0, 0.0);
  p.bulk.conductivity = 1.0;
  p.bulk.source = constant_field(0.0);
  for (auto tag : {FaceTag::lateral, FaceTag::top, FaceTag::bottom, FaceTag::other})
    p.bulk.set(tag, DirichletData{constant_field(0.0)});
  return p;
}

TestProblem cgtest_like(std::uint64_t seed, int count) {
  TestProblem p;
  p.name = "cgtest_like";
  p.box = kCube;
  p.network = generate_random_network(count, p.box, 0.2, seed);
  assign_segment_data(p.network, 1e-2, 1e-2, 30.0, 0.0, 5e-3);
  p.bulk.conductivity = 2e-4;
  p.bulk.source = constant_field(0.0);
  for (auto tag : {FaceTag::lateral, FaceTag::top, FaceTag::bottom, FaceTag::other})
    p.bulk.set(tag, NeumannData{constant_field(2e-5)});
  return p;
}

TestProblem make_problem(const std::string &name, std::uint64_t seed, int count) {
  if (name == "tp1") return tp1();
  if (name == "tp2_like") return tp2_like(seed, count > 0 ? count : 19);
  if (name == "cgtest_like") return cgtest_like(seed, count > 0 ? count : 50);
  throw std::invalid_argument("unknown problem '" + name + "'");
}

ResidualReport residual_check(const TestProblem &problem) {
  if (!problem.exact) throw std::invalid_argument("residual_check: problem has no exact solution");
  const ExactSolution &ex = *problem.exact;
  const double K = problem.bulk.conductivity;
  ResidualReport rep;
  constexpr double h = 1e-2;

  constexpr int grid = 9;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j)
      for (int k = 0; k < grid; ++k) {
        const Vec3 t(i, j, k);
        const Vec3 x = problem.box.lo + (problem.box.hi - problem.box.lo).cwiseProduct(t / (grid - 1.0));
        double div = 0.0;
        for (int c = 0; c < 3; ++c)
          div += central_derivative([&](double e) { return ex.grad_u(x + e * Vec3::Unit(c))(c); }, h);
        rep.bulk = std::max(rep.bulk, std::abs(-K * div - problem.bulk.source(x)));
        ++rep.samples;
      }

  constexpr int along = 41, around = 8;
  for (const auto &seg : problem.network.segments) {
    const double S = seg.length();
    const auto [e1, e2] = normal_frame(seg.tangent());
    for (int i = 0; i < along; ++i) {
      const double s = S * i / (along - 1.0);
      const double flux_rate = central_derivative(
          [&](double e) { return seg.ktilde(s + e) * seg.area(s + e) * ex.duhat_ds(seg, s + e); }, h);
      const double jump = ex.uhat(seg.point(s)) - ex.u_check(seg, s);
      const double r2 = -flux_rate + seg.beta * seg.perimeter(s) * jump - seg.area(s) * seg.gbar(s);
      rep.segment = std::max(rep.segment, std::abs(r2));
      for (int a = 0; a < around; ++a) {
        const double th = 2.0 * std::numbers::pi * a / around;
        const Vec3 radial = std::cos(th) * e1 + std::sin(th) * e2;
        const Vec3 x = seg.point(s) + seg.radius * radial;
        const double r3 = K * ex.grad_u(x).dot(-radial) - seg.beta * (ex.uhat(seg.point(s)) - ex.u(x));
        rep.interface = std::max(rep.interface, std::abs(r3));
      }
      ++rep.samples;
    }
  }
  return rep;
}

} // namespace opt3d1d
