#pragma once

#include <vector>

#include "cbseg/imagecore.hpp"

namespace cbseg {

struct PointI {
    int x = 0;
    int y = 0;
    bool operator==(const PointI&) const = default;
};

// Ordered outer boundary of one 8-connected foreground component. Consecutive
// points are 8-adjacent and the walk is closed (last adjacent to first).
struct Contour {
    std::vector<PointI> points;
    /// Pixel count of the component this boundary encloses.
    std::size_t area = 0;
};

// Convex polygon, vertices counter-clockwise in mathematical orientation
// (y up); no three collinear vertices retained. May degenerate to a single
// vertex or a segment.
struct Polygon {
    std::vector<PointI> vertices;
};

/// Cross product (a-o) x (b-o); > 0 means a counter-clockwise turn.
inline long long cross(const PointI& o, const PointI& a, const PointI& b) {
    return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
           static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

// One outer boundary per 8-connected foreground component (Moore tracing);
// hole boundaries are ignored.
std::vector<Contour> find_contours(const BinaryMask& mask);

/// Monotone-chain hull of a point set. Throws on an empty input.
Polygon convex_hull(const std::vector<PointI>& points);

// Scanline-rasterizes the hull interior into the mask, boundary pixels
// included. Crossings are evaluated in exact integer arithmetic; half-integer
// ties round toward the interior.
void rasterize_convex(const Polygon& poly, BinaryMask& out);

// Union of the rasterized convex hulls of all component contours. Components
// with fewer than min_area pixels are skipped (0 disables the filter).
BinaryMask fill_hulls(const BinaryMask& mask, std::size_t min_area = 0);

/// Pixelwise AND. Throws on dimension mismatch.
BinaryMask intersect(const BinaryMask& a, const BinaryMask& b);

} // namespace cbseg
