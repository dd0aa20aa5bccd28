#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "opt3d1d/network.hpp"

namespace opt3d1d {

ScalarField constant_field(double value) {
  return [value](const Vec3 &) { return value; };
}

double Segment::perimeter(double) const { return 2.0 * std::numbers::pi * radius; }
double Segment::area(double) const { return std::numbers::pi * radius * radius; }

double SegmentNetwork::total_length() const {
  double total = 0.0;
  for (const auto &s : segments) total += s.length();
  return total;
}

BoundingBox SegmentNetwork::bounding_box() const {
  BoundingBox box;
  if (segments.empty()) return box;
  box.lo = box.hi = segments.front().a;
  for (const auto &s : segments) {
    box.lo = box.lo.cwiseMin(s.a).cwiseMin(s.b);
    box.hi = box.hi.cwiseMax(s.a).cwiseMax(s.b);
  }
  return box;
}

void validate_segment(const Segment &seg) {
  if (!(seg.length() > 0.0)) throw std::invalid_argument(fmt::format("segment {} has zero length", seg.id));
  if (!(seg.radius > 0.0)) throw std::invalid_argument(fmt::format("segment {} has non-positive radius", seg.id));
  if (!(seg.beta >= 0.0)) throw std::invalid_argument(fmt::format("segment {} has negative beta", seg.id));
}

namespace {

double default_tolerance(const SegmentNetwork &network, double tolerance) {
  if (tolerance >= 0.0) return tolerance;
  double diag = network.bounding_box().diagonal();
  return 1e-12 * (diag > 0.0 ? diag : 1.0);
}

struct Projection {
  double s;
  double distance;
};

Projection project(const Segment &seg, const Vec3 &p) {
  double len = seg.length();
  double s = std::clamp((p - seg.a).dot(seg.tangent()), 0.0, len);
  return {s, (seg.point(s) - p).norm()};
}

} // namespace

SegmentNetwork split_at_junctions(const SegmentNetwork &network, double tolerance) {
  const double tol = default_tolerance(network, tolerance);
  const std::size_t nseg = network.segments.size();
  std::vector<std::vector<double>> cuts(nseg);

  for (std::size_t j = 0; j < network.junctions.size(); ++j) {
    const auto &junction = network.junctions[j];
    for (const auto &end : junction.ends) {
      if (end.segment < 0 || static_cast<std::size_t>(end.segment) >= nseg)
        throw GeometryError(fmt::format("junction {} references unknown segment {}", j, end.segment));
      const auto &seg = network.segments[end.segment];
      auto proj = project(seg, junction.point);
      if (proj.distance > tol)
        throw GeometryError(fmt::format("junction {} lies {:.3e} away from segment {}", j, proj.distance, seg.id));
      if (proj.s > tol && proj.s < seg.length() - tol) cuts[end.segment].push_back(proj.s);
    }
  }

  SegmentNetwork out;
  std::vector<std::vector<int>> children(nseg);
  for (std::size_t i = 0; i < nseg; ++i) {
    const auto &seg = network.segments[i];
    auto &c = cuts[i];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end(), [tol](double x, double y) { return y - x <= tol; }), c.end());

    std::vector<Vec3> points{seg.a};
    for (double s : c) points.push_back(seg.point(s));
    points.push_back(seg.b);
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
      Segment piece = seg;
      piece.id = static_cast<int>(out.segments.size());
      piece.parent = seg.parent >= 0 ? seg.parent : seg.id;
      piece.a = points[k];
      piece.b = points[k + 1];
      piece.endpoint_bc[0] = k == 0 ? seg.endpoint_bc[0] : EndpointBc{NeumannZero{}};
      piece.endpoint_bc[1] = k + 2 == points.size() ? seg.endpoint_bc[1] : EndpointBc{NeumannZero{}};
      children[i].push_back(piece.id);
      out.segments.push_back(std::move(piece));
    }
  }

  for (std::size_t j = 0; j < network.junctions.size(); ++j) {
    const auto &junction = network.junctions[j];
    Junction rebuilt{junction.point, {}};
    std::vector<int> parents;
    for (const auto &end : junction.ends) parents.push_back(end.segment);
    std::sort(parents.begin(), parents.end());
    parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
    for (int parent : parents)
      for (int child : children[parent]) {
        auto &piece = out.segments[child];
        for (Endpoint e : {Endpoint::start, Endpoint::end}) {
          if ((piece.endpoint(e) - junction.point).norm() <= tol) {
            rebuilt.ends.push_back({child, e});
            piece.endpoint_bc[e == Endpoint::start ? 0 : 1] = JunctionLink{static_cast<int>(j)};
          }
        }
      }
    out.junctions.push_back(std::move(rebuilt));
  }
  return out;
}

SegmentNetwork infer_junctions(std::vector<Segment> segments, double tolerance) {
  SegmentNetwork out;
  out.segments = std::move(segments);
  for (std::size_t i = 0; i < out.segments.size(); ++i) out.segments[i].id = static_cast<int>(i);
  const double tol = default_tolerance(out, tolerance);

  std::vector<JunctionEnd> ends;
  for (const auto &s : out.segments) {
    ends.push_back({s.id, Endpoint::start});
    ends.push_back({s.id, Endpoint::end});
  }
  std::vector<bool> used(ends.size(), false);
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (used[i]) continue;
    const Vec3 p = out.segments[ends[i].segment].endpoint(ends[i].end);
    Junction junction{p, {ends[i]}};
    for (std::size_t k = i + 1; k < ends.size(); ++k) {
      if (used[k]) continue;
      if ((out.segments[ends[k].segment].endpoint(ends[k].end) - p).norm() <= tol) {
        junction.ends.push_back(ends[k]);
        used[k] = true;
      }
    }
    if (junction.ends.size() < 2) continue;
    const int jid = static_cast<int>(out.junctions.size());
    for (const auto &e : junction.ends)
      out.segments[e.segment].endpoint_bc[e.end == Endpoint::start ? 0 : 1] = JunctionLink{jid};
    out.junctions.push_back(std::move(junction));
  }
  return out;
}

namespace {

// Portable uniform doubles: the standard distributions are implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform() * n)); }
  Vec3 direction() {
    double z = uniform(-1.0, 1.0);
    double phi = uniform(0.0, 2.0 * std::numbers::pi);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

private:
  std::mt19937_64 engine_;
};

} // namespace

SegmentNetwork generate_random_network(int count, const BoundingBox &box, double min_length, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("generate_random_network: count must be >= 1");
  if (!((box.hi.array() > box.lo.array()).all())) throw std::invalid_argument("generate_random_network: empty box");
  const double extent = (box.hi - box.lo).minCoeff();
  if (!(min_length > 0.0) || min_length > 0.5 * extent)
    throw std::invalid_argument("generate_random_network: box too small for min_length");

  Rng rng(seed);
  const double margin = 0.02 * extent;
  const double max_length = std::max(min_length, std::min(2.0 * min_length, 0.5 * extent));
  BoundingBox inner{box.lo + Vec3::Constant(margin), box.hi - Vec3::Constant(margin)};

  struct Piece {
    Vec3 a, b;
    bool inlet;
  };
  std::vector<Piece> pieces;

  auto grow = [&](const Vec3 &start, bool upward) -> std::optional<Vec3> {
    for (int attempt = 0; attempt < 200; ++attempt) {
      Vec3 dir = rng.direction();
      if (upward) {
        dir.z() = std::abs(dir.z());
        if (dir.z() < 0.3) continue;
      }
      Vec3 end = start + rng.uniform(min_length, max_length) * dir;
      if (inner.contains(end)) return end;
    }
    return std::nullopt;
  };

  const int clusters = 1 + (count - 1) / 25;
  int guard = 0;
  while (static_cast<int>(pieces.size()) < clusters) {
    if (++guard > 10000) throw std::invalid_argument("generate_random_network: cannot place inlet segments");
    Vec3 start(rng.uniform(inner.lo.x(), inner.hi.x()), rng.uniform(inner.lo.y(), inner.hi.y()), box.lo.z());
    if (auto end = grow(start, true)) pieces.push_back({start, *end, true});
  }
  guard = 0;
  while (static_cast<int>(pieces.size()) < count) {
    if (++guard > 100000) throw std::invalid_argument("generate_random_network: cannot grow network");
    const std::size_t j = rng.index(pieces.size());
    const bool split = count - static_cast<int>(pieces.size()) >= 2 && rng.uniform() < 0.3;
    if (split) {
      const Piece parent = pieces[j];
      const Vec3 p = parent.a + rng.uniform(0.3, 0.7) * (parent.b - parent.a);
      auto end = grow(p, false);
      if (!end) continue;
      pieces[j] = {parent.a, p, parent.inlet};
      pieces.push_back({p, parent.b, false});
      pieces.push_back({p, *end, false});
    } else {
      const Vec3 p = pieces[j].b;
      auto end = grow(p, false);
      if (!end) continue;
      pieces.push_back({p, *end, false});
    }
  }

  std::vector<Segment> segments;
  for (const auto &piece : pieces) {
    Segment seg;
    seg.id = static_cast<int>(segments.size());
    seg.a = piece.a;
    seg.b = piece.b;
    if (piece.inlet) seg.endpoint_bc[0] = Dirichlet{0.0};
    segments.push_back(std::move(seg));
  }
  return infer_junctions(std::move(segments));
}

namespace {

EndpointBc parse_bc(const std::string &token, int line) {
  if (token == "N") return NeumannZero{};
  if (token.rfind("D:", 0) == 0) {
    try {
      std::size_t used = 0;
      double v = std::stod(token.substr(2), &used);
      if (used == token.size() - 2) return Dirichlet{v};
    } catch (const std::exception &) {
    }
  }
  throw ParseError("invalid endpoint condition '" + token + "'", line);
}

std::string format_bc(const EndpointBc &bc) {
  if (const auto *d = std::get_if<Dirichlet>(&bc)) return fmt::format("D:{:.17g}", d->value);
  return "N";
}

} // namespace

SegmentNetwork parse_network(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::vector<Segment> segments;
  while (std::getline(in, line)) {
    ++line_no;
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ss(line);
    Segment seg;
    double ktilde = 0, gbar = 0;
    std::string bc_a, bc_b, extra;
    if (!(ss >> seg.a.x() >> seg.a.y() >> seg.a.z() >> seg.b.x() >> seg.b.y() >> seg.b.z() >> seg.radius >> seg.beta >>
          ktilde >> gbar >> bc_a >> bc_b) ||
        (ss >> extra))
      throw ParseError("expected `ax ay az bx by bz R beta Ktilde gbar bc_a bc_b`", line_no);
    seg.id = static_cast<int>(segments.size());
    seg.conductivity_tilde = constant_field(ktilde);
    seg.source_gbar = constant_field(gbar);
    seg.endpoint_bc = {parse_bc(bc_a, line_no), parse_bc(bc_b, line_no)};
    try {
      validate_segment(seg);
    } catch (const std::invalid_argument &e) {
      throw ParseError(e.what(), line_no);
    }
    segments.push_back(std::move(seg));
  }
  return infer_junctions(std::move(segments));
}

SegmentNetwork load_network(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

std::string format_network(const SegmentNetwork &network) {
  std::string out = "# ax ay az bx by bz R beta Ktilde gbar bc_a bc_b\n";
  for (const auto &s : network.segments) {
    const Vec3 mid = 0.5 * (s.a + s.b);
    out += fmt::format("{:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {} {}\n",
                       s.a.x(), s.a.y(), s.a.z(), s.b.x(), s.b.y(), s.b.z(), s.radius, s.beta,
                       s.conductivity_tilde(mid), s.source_gbar(mid), format_bc(s.endpoint_bc[0]),
                       format_bc(s.endpoint_bc[1]));
  }
  return out;
}

} // namespace opt3d1d
