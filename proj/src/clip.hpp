#pragma once

#include "geometry.hpp"

namespace pforge {

enum class BoolOp { Intersection, Union, Difference, Xor };

// Point-set boolean operation over two regions. Input vertices are snapped
// to a 1e-9 grid before clipping; holes are handled by even-odd parity, so
// operand ring orientation does not matter. The result is a normalized
// PolygonSet (possibly empty).
PolygonSet boolean_op(const PolygonSet& subject, const PolygonSet& clipping, BoolOp op);

inline PolygonSet region_intersect(const PolygonSet& a, const PolygonSet& b) {
    return boolean_op(a, b, BoolOp::Intersection);
}
inline PolygonSet region_union(const PolygonSet& a, const PolygonSet& b) {
    return boolean_op(a, b, BoolOp::Union);
}
inline PolygonSet region_difference(const PolygonSet& a, const PolygonSet& b) {
    return boolean_op(a, b, BoolOp::Difference);
}
inline PolygonSet region_xor(const PolygonSet& a, const PolygonSet& b) {
    return boolean_op(a, b, BoolOp::Xor);
}

// n-ary union, divide and conquer
PolygonSet region_union_all(std::vector<PolygonSet> parts);

Coord snap_to_grid(const Coord& c);

}  // namespace pforge
