#pragma once

#include <array>
#include <vector>

#include "opt3d1d/geom.hpp"
#include "opt3d1d/network.hpp"
#include "opt3d1d/quadrature.hpp"

namespace opt3d1d {

/// One sub-interval of a segment contained in a single tet. Barycentric
/// coordinates of the point at arclength s are `bary0 + s * bary_slope`.
struct TraceCell {
  Interval interval;
  int tet = -1;
  std::array<double, 4> bary0{};
  std::array<double, 4> bary_slope{};

  std::array<double, 4> barycentric(double s) const {
    return {bary0[0] + s * bary_slope[0], bary0[1] + s * bary_slope[1], bary0[2] + s * bary_slope[2],
            bary0[3] + s * bary_slope[3]};
  }
};

/// Restriction structure of the P1 space along one segment: breakpoints
/// 0 = s_0 < ... < s_m = S at the tet-boundary crossings.
struct TraceDecomposition {
  int segment_id = -1;
  std::vector<double> breakpoints;
  std::vector<TraceCell> cells;

  /// Interior breakpoints m - 1.
  int crossing_count() const { return breakpoints.size() < 2 ? 0 : static_cast<int>(breakpoints.size()) - 2; }
  /// Cell whose closed interval contains s (the first one on a tie).
  const TraceCell &cell_at(double s) const;
};

/// Which incident tet owns a sub-interval lying on a shared face or edge.
enum class TieBreak { lowest_index, highest_index };

/// Throws GeometryError if part of the segment lies outside every tet.
TraceDecomposition trace_segment(const TetMesh &mesh, const Segment &segment,
                                 TieBreak tie_break = TieBreak::lowest_index);

std::vector<TraceDecomposition> trace_network(const TetMesh &mesh, const SegmentNetwork &network,
                                              TieBreak tie_break = TieBreak::lowest_index);

enum class PartitionRole { uhat, psi_d, psi_sigma };

const char *to_string(PartitionRole role);

/// Equally spaced 1D nodes on [0, S] carrying piecewise-linear hat functions.
struct Partition1D {
  int segment_id = -1;
  PartitionRole role = PartitionRole::uhat;
  std::vector<double> nodes;

  int size() const { return static_cast<int>(nodes.size()); }
  double length() const { return nodes.back(); }

  /// Element k with nodes[k] <= s <= nodes[k+1].
  int element_at(double s) const;

  struct Local {
    int element;
    std::array<double, 2> value;
    std::array<double, 2> slope;
  };
  Local evaluate(double s) const;
  /// Piecewise-linear interpolant of nodal values at s.
  double interpolate(const Vector &values, double s) const;
};

/// max(2, round(delta * crossing_count)) equally spaced nodes on [0, S].
Partition1D build_partition(const Segment &segment, PartitionRole role, double delta, int crossing_count);

struct PartitionDeltas {
  double uhat = 1.0;
  double psi_d = 0.5;
  double psi_sigma = 0.5;
};

struct SegmentPartitions {
  Partition1D uhat;
  Partition1D psi_d;
  Partition1D psi_sigma;
};

/// Builds the three partitions per segment, normalizing by each segment's
/// crossing count (at least 1).
std::vector<SegmentPartitions> build_partitions(const SegmentNetwork &network,
                                                const std::vector<TraceDecomposition> &traces,
                                                const PartitionDeltas &deltas);

} // namespace opt3d1d
