#include "ids/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <gmpxx.h>

namespace ids::geometry {

namespace {

// Forward error bounds for the two determinants evaluated in binary64
// (Shewchuk's ccwerrboundA / iccerrboundA); they remain valid for the wider
// long double evaluation used below.
constexpr double kEps = std::numeric_limits<double>::epsilon() / 2;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

int sign_of(const mpq_class& v) { return sgn(v); }

template <typename T>
int sign_of(T v) {
    return (v > 0) - (v < 0);
}

int orient2d_exact(const Point2& a, const Point2& b, const Point2& c) {
    mpq_class acx = mpq_class(a[0]) - c[0], acy = mpq_class(a[1]) - c[1];
    mpq_class bcx = mpq_class(b[0]) - c[0], bcy = mpq_class(b[1]) - c[1];
    return sign_of(mpq_class(acx * bcy - acy * bcx));
}

int incircle_exact(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    mpq_class adx = mpq_class(a[0]) - d[0], ady = mpq_class(a[1]) - d[1];
    mpq_class bdx = mpq_class(b[0]) - d[0], bdy = mpq_class(b[1]) - d[1];
    mpq_class cdx = mpq_class(c[0]) - d[0], cdy = mpq_class(c[1]) - d[1];
    mpq_class alift = adx * adx + ady * ady;
    mpq_class blift = bdx * bdx + bdy * bdy;
    mpq_class clift = cdx * cdx + cdy * cdy;
    mpq_class det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) + clift * (adx * bdy - bdx * ady);
    return sign_of(det);
}

}  // namespace

int orient2d(const Point2& a, const Point2& b, const Point2& c) {
    using L = long double;
    L left = (L(a[0]) - c[0]) * (L(b[1]) - c[1]);
    L right = (L(a[1]) - c[1]) * (L(b[0]) - c[0]);
    L det = left - right;
    L bound = kOrientBound * (std::fabs(left) + std::fabs(right));
    if (det > bound || -det > bound) return sign_of(det);
    return orient2d_exact(a, b, c);
}

int incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    using L = long double;
    L adx = L(a[0]) - d[0], ady = L(a[1]) - d[1];
    L bdx = L(b[0]) - d[0], bdy = L(b[1]) - d[1];
    L cdx = L(c[0]) - d[0], cdy = L(c[1]) - d[1];
    L bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    L cdxady = cdx * ady, adxcdy = adx * cdy;
    L adxbdy = adx * bdy, bdxady = bdx * ady;
    L alift = adx * adx + ady * ady;
    L blift = bdx * bdx + bdy * bdy;
    L clift = cdx * cdx + cdy * cdy;
    L det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    L permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift + (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                  (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    L bound = kIncircleBound * permanent;
    if (det > bound || -det > bound) return sign_of(det);
    return incircle_exact(a, b, c, d);
}

int incircle_perturbed(const Point2& a, const Point2& b, const Point2& c, const Point2& d,
                       std::array<std::size_t, 4> priority, bool* degenerate) {
    if (degenerate) *degenerate = false;
    int s = incircle(a, b, c, d);
    if (s != 0) return s;
    if (degenerate) *degenerate = true;
    // Coefficient of each perturbation in the in-circle determinant:
    //   a: orient(b,c,d)   b: -orient(a,c,d)   c: orient(a,b,d)   d: -orient(a,b,c)
    const std::array<const Point2*, 4> pts{&a, &b, &c, &d};
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int x, int y) { return priority[x] < priority[y]; });
    for (int k : order) {
        int coefficient = 0;
        switch (k) {
            case 0: coefficient = orient2d(*pts[1], *pts[2], *pts[3]); break;
            case 1: coefficient = -orient2d(*pts[0], *pts[2], *pts[3]); break;
            case 2: coefficient = orient2d(*pts[0], *pts[1], *pts[3]); break;
            default: coefficient = -orient2d(*pts[0], *pts[1], *pts[2]); break;
        }
        if (coefficient != 0) return coefficient;
    }
    return 0;
}

Point2 circumcenter(const Point2& a, const Point2& b, const Point2& c) {
    using L = long double;
    L bx = L(b[0]) - a[0], by = L(b[1]) - a[1];
    L cx = L(c[0]) - a[0], cy = L(c[1]) - a[1];
    L d = 2 * (bx * cy - by * cx);
    L b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    L ux = (cy * b2 - by * c2) / d;
    L uy = (bx * c2 - cx * b2) / d;
    return {static_cast<double>(ux + a[0]), static_cast<double>(uy + a[1])};
}

}  // namespace ids::geometry
