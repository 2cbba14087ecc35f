#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "layerlab/curve.hpp"
#include "layerlab/field.hpp"
#include "layerlab/profile.hpp"

namespace layerlab {

// Marching squares on the level set {f = level}. Edge crossings are linear
// interpolations, saddle cells are split by the cell-centre average, and the
// segments are chained into curves with {f < level} on their left. Contours
// that leave the grid come back with closed == false.
std::vector<Curve> extract_level_set(const ScalarField& f, double level);

struct SignedDistanceResult {
  Point query;
  double distance = 0.0;  // negative on the interior (left) side
  Point foot;
};

SignedDistanceResult signed_distance(Point q, const Curve& c);

// Directed distance sup_{p in a} dist(p, b), computed by Lipschitz
// branch-and-bound over the segments of a (absolute accuracy ~1e-12).
double directed_hausdorff(const Curve& a, const Curve& b);
double hausdorff(const Curve& a, const Curve& b);

// Unsigned distance from every grid node to the union of `curves`, resolved
// exactly up to `radius`; nodes farther away hold +infinity.
struct DistanceBand {
  std::vector<double> distance;
  std::vector<std::uint32_t> curve;
  std::vector<std::uint32_t> segment;
  std::vector<double> param;
};

DistanceBand distance_band(const GridGeometry& g, std::span<const Curve> curves, double radius);

// max over nodes of |u - U0(d_eps / eps)| where d_eps is the signed distance
// to the level set {u = a}, negative where u < a.
double layer_error(const ScalarField& u, const LayerProfile& p, double eps);

struct GraphSample {
  Point base;          // reference vertex
  Point normal;        // outward unit normal there
  double offset = 0.0;  // target = base + offset * normal
};

// Writes the target as a normal graph over the reference within |s| <= tube.
// Throws GraphPropertyError if some normal line meets the target zero or
// several times.
std::vector<GraphSample> graph_over(const Curve& reference, const Curve& target, double tube);

// Minimum of grad u . n(p(x)) over grid nodes x within `tube` of the
// reference curve, with p(x) the closest point and n the outward normal
// there. Returns 0 when no node lies in the tube.
double transversality(const ScalarField& u, const Curve& reference, double tube);

}  // namespace layerlab
