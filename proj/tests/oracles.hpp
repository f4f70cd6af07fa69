#pragma once

// Independent reference computations for the test suites. Everything here is
// deliberately written from first principles rather than through the library
// code paths it checks.

#include <cmath>
#include <cstdint>
#include <vector>

#include "cbseg/geometry.hpp"

namespace oracle {

// Deterministic generator for reproducible randomized tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t x = (state_ += 0x9E3779B97F4A7C15ULL);
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }
    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double uniform_real(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }

private:
    std::uint64_t state_;
};

// Inside-or-on test against a convex polygon by checking the sign of every
// edge cross product; handles the degenerate single-point and segment cases.
inline bool point_in_hull(const cbseg::Polygon& poly, const cbseg::PointI& p) {
    const auto& v = poly.vertices;
    if (v.empty())
        return false;
    if (v.size() == 1)
        return v[0] == p;
    if (v.size() == 2) {
        if (cbseg::cross(v[0], v[1], p) != 0)
            return false;
        const auto within = [](int a, int b, int q) {
            return q >= std::min(a, b) && q <= std::max(a, b);
        };
        return within(v[0].x, v[1].x, p.x) && within(v[0].y, v[1].y, p.y);
    }
    for (std::size_t i = 0; i < v.size(); ++i)
        if (cbseg::cross(v[i], v[(i + 1) % v.size()], p) < 0)
            return false;
    return true;
}

// Longest negative run for a 0/1 match string (1-based frames): the lead-in
// before the first match, the spacing between consecutive matches, and the
// wrapped run across the training boundary.
inline int longest_gap(const std::vector<int>& matches) {
    const int n = static_cast<int>(matches.size());
    int first = -1, last = -1, prev = -1, best = 0;
    for (int t = 1; t <= n; ++t) {
        if (!matches[t - 1])
            continue;
        if (first < 0)
            first = t;
        if (prev > 0 && t - prev > best)
            best = t - prev;
        prev = t;
        last = t;
    }
    if (first < 0)
        return n; // never matched
    best = std::max(best, first - 1);
    best = std::max(best, n - last + first - 1);
    return best;
}

// Color distortion via exact integer arithmetic on the squared form:
// delta^2 = (|p|^2 |w|^2 - (p.w)^2) / |w|^2.
inline double color_distortion_exact(const int p[3], const int w[3]) {
    const std::int64_t p2 = static_cast<std::int64_t>(p[0]) * p[0] +
                            static_cast<std::int64_t>(p[1]) * p[1] +
                            static_cast<std::int64_t>(p[2]) * p[2];
    const std::int64_t w2 = static_cast<std::int64_t>(w[0]) * w[0] +
                            static_cast<std::int64_t>(w[1]) * w[1] +
                            static_cast<std::int64_t>(w[2]) * w[2];
    const std::int64_t dot = static_cast<std::int64_t>(p[0]) * w[0] +
                             static_cast<std::int64_t>(p[1]) * w[1] +
                             static_cast<std::int64_t>(p[2]) * w[2];
    const std::int64_t num = p2 * w2 - dot * dot;
    return std::sqrt(static_cast<double>(num) / static_cast<double>(w2));
}

} // namespace oracle
