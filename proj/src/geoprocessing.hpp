#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "attr.hpp"
#include "clip.hpp"
#include "geometry.hpp"
#include "store.hpp"

namespace pforge {

enum class SpatialPredicate { Intersects, Contains, Within };

std::optional<SpatialPredicate> spatial_predicate_from_name(std::string_view name);

struct AttributePredicate {
    enum class Op { Eq, Ne, Lt, Le, Gt, Ge, ContainsText };
    std::string column;
    Op op = Op::Eq;
    AttrValue value;
};

// Positive outward expansion by `distance` with circular arcs approximated
// by `quadrant_segments` vertices per quadrant, all lying on the true
// circle. Convex inputs (points, single segments, convex polygons) take a
// direct outline construction; everything else is a union of the source
// region with per-edge capsules.
Geometry buffer(const Geometry& geom, double distance, int quadrant_segments);

// point-set predicates with shared boundaries allowed
bool geometry_intersects(const Geometry& a, const Geometry& b);
bool geometry_contains(const Geometry& a, const Geometry& b);  // a contains b

// All ordered (left_id, right_id) pairs whose geometries satisfy the
// predicate, R-tree candidate filtered then exact tested, sorted by
// (left_id, right_id). Layers must share a CRS.
std::vector<std::pair<std::string, std::string>> spatial_join(const Layer& left,
                                                              const Layer& right,
                                                              SpatialPredicate pred);

// Conjunction of the supplied predicates; at least one must be present.
// The spatial predicate is feature-centric: Within keeps features lying
// inside the probe geometry.
std::vector<std::string> select_features(
    const Layer& layer, const std::optional<AttributePredicate>& attr,
    const std::optional<std::pair<SpatialPredicate, Geometry>>& spatial);

}  // namespace pforge
