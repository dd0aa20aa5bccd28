#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string_view>
#include <variant>
#include <vector>

#include "opt3d1d/geom.hpp"

namespace opt3d1d {

/// Coefficient along a centerline, evaluated at the 3D centerline point.
/// Point-valued (rather than arclength-valued) so sub-segments produced by
/// junction splitting inherit their parent's field unchanged.
using ScalarField = std::function<double(const Vec3 &)>;

ScalarField constant_field(double value);

struct NeumannZero {};
struct Dirichlet {
  double value = 0.0;
};
struct JunctionLink {
  int junction = -1;
};
using EndpointBc = std::variant<NeumannZero, Dirichlet, JunctionLink>;

enum class Endpoint : std::uint8_t { start, end, interior };

/// Rectilinear inclusion centerline with a circular cross-section.
struct Segment {
  int id = 0;
  int parent = -1; ///< id of the segment this one was split from, -1 if original
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::UnitX();
  double radius = 1e-2;
  double beta = 1.0;
  ScalarField conductivity_tilde = constant_field(1.0);
  ScalarField source_gbar = constant_field(0.0);
  std::array<EndpointBc, 2> endpoint_bc{NeumannZero{}, NeumannZero{}};

  double length() const { return (b - a).norm(); }
  Vec3 tangent() const { return (b - a) / length(); }
  Vec3 point(double s) const { return a + s * tangent(); }
  Vec3 endpoint(Endpoint e) const { return e == Endpoint::start ? a : b; }

  double perimeter(double /*s*/) const;
  double area(double /*s*/) const;
  double ktilde(double s) const { return conductivity_tilde(point(s)); }
  double gbar(double s) const { return source_gbar(point(s)); }
};

struct JunctionEnd {
  int segment = -1;
  Endpoint end = Endpoint::start;
};

struct Junction {
  Vec3 point = Vec3::Zero();
  std::vector<JunctionEnd> ends;
};

struct SegmentNetwork {
  std::vector<Segment> segments;
  std::vector<Junction> junctions;

  double total_length() const;
  BoundingBox bounding_box() const;
  double geometric_tolerance() const { return 1e-12 * bounding_box().diagonal(); }
};

/// Throws std::invalid_argument on a zero-length segment, non-positive radius
/// or negative beta (beta = 0 decouples the segment).
void validate_segment(const Segment &seg);

/// Splits every segment at the junction points lying in its interior. On
/// return each junction lists every incident (segment, endpoint) pair and
/// those endpoints carry a JunctionLink bc. Ends flagged `interior` in the
/// input are located geometrically. Throws GeometryError if a junction point
/// is farther than the tolerance from a listed segment.
SegmentNetwork split_at_junctions(const SegmentNetwork &network, double tolerance = -1.0);

/// Groups coincident endpoints of `segments` into junctions (arity >= 2).
SegmentNetwork infer_junctions(std::vector<Segment> segments, double tolerance = -1.0);

/// Seeded random branching network inside `box`. Inlet segments start on the
/// face z = box.lo.z (Dirichlet 0 there); every other point lies strictly
/// inside the box. Branches start from existing tips or split existing
/// segments, so the result contains junctions. Deterministic in `seed`.
SegmentNetwork generate_random_network(int count, const BoundingBox &box, double min_length, std::uint64_t seed);

/// One segment per line: `ax ay az bx by bz R beta Ktilde gbar bc_a bc_b`,
/// bc in {D:<value>, N}. Junctions are inferred from coincident endpoints.
SegmentNetwork parse_network(std::string_view text);
SegmentNetwork load_network(const std::filesystem::path &path);
/// Writes constant coefficients sampled at each segment midpoint.
std::string format_network(const SegmentNetwork &network);

} // namespace opt3d1d
