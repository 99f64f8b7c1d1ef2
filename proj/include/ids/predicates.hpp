#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace ids::geometry {

using Point2 = std::array<double, 2>;

// Sign of the orientation determinant: +1 if a, b, c turn counterclockwise,
// -1 clockwise, 0 collinear. Exact: a long double evaluation is accepted when
// it clears its forward error bound, otherwise the determinant is recomputed
// in rational arithmetic.
int orient2d(const Point2& a, const Point2& b, const Point2& c);

// Exact sign of the in-circle determinant for counterclockwise a, b, c:
// +1 if d lies strictly inside their circumcircle, 0 on it, -1 outside.
int incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d);

// In-circle with a symbolic tie-break. Point k's lifted coordinate x^2 + y^2
// is perturbed by eps^(rank k), ranks given by `priority` (smaller value =
// larger perturbation). Never returns 0 for a nondegenerate triangle abc.
// `degenerate` is set when the exact determinant vanished.
int incircle_perturbed(const Point2& a, const Point2& b, const Point2& c, const Point2& d,
                       std::array<std::size_t, 4> priority, bool* degenerate = nullptr);

// Circumcentre of a nondegenerate triangle (double precision).
Point2 circumcenter(const Point2& a, const Point2& b, const Point2& c);

}  // namespace ids::geometry
