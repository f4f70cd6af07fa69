#include "cbseg/geometry.hpp"

#include <algorithm>

namespace cbseg {

namespace {

// Clockwise neighbor order on screen (y grows downward), starting west.
constexpr int kDx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

// Moore-neighbor tracing, clockwise. The seed must be the topmost-leftmost
// pixel of its component so the west neighbor is guaranteed background. The
// walk stops when it is about to repeat its first move out of the seed; the
// continuation is a deterministic function of (pixel, move direction), so
// reaching that state again means the boundary cycle is complete.
std::vector<PointI> trace_boundary(const BinaryMask& mask, PointI start, std::size_t area) {
    auto fg = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < mask.width() && y < mask.height() && mask.foreground(x, y);
    };
    auto scan = [&](const PointI& p, int back_dir) {
        for (int i = 0; i < 8; ++i) {
            const int d = (back_dir + i) % 8;
            if (fg(p.x + kDx[d], p.y + kDy[d]))
                return d;
        }
        return -1;
    };

    std::vector<PointI> contour{start};
    const int first_dir = scan(start, 0);
    if (first_dir < 0)
        return contour; // isolated pixel

    PointI current = start;
    int back_dir = 0; // direction from current toward its backtrack pixel
    const std::size_t cap = 8 * area + 16;
    for (std::size_t iter = 0; iter < cap; ++iter) {
        const int hit = scan(current, back_dir);
        if (hit < 0 || (iter > 0 && current == start && hit == first_dir))
            break;
        const PointI next{current.x + kDx[hit], current.y + kDy[hit]};
        // The neighbor examined just before the hit is background and becomes
        // the next backtrack; the scan always starts on a background pixel,
        // so that neighbor is (hit - 1) mod 8.
        const PointI last_bg{current.x + kDx[(hit + 7) % 8], current.y + kDy[(hit + 7) % 8]};
        int next_back = 0;
        for (int d = 0; d < 8; ++d)
            if (next.x + kDx[d] == last_bg.x && next.y + kDy[d] == last_bg.y)
                next_back = d;
        contour.push_back(next);
        current = next;
        back_dir = next_back;
    }
    if (contour.size() > 1 && contour.back() == contour.front())
        contour.pop_back();
    return contour;
}

long long floor_div(long long a, long long b) {
    return a >= 0 ? a / b : -((-a + b - 1) / b);
}

long long ceil_div(long long a, long long b) {
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

} // namespace

// Enumerates 8-connected components in scan order. The callback receives the
// topmost-leftmost pixel, the area, and the component's pixels (buffer reused
// between components).
template <typename Fn>
void for_each_component(const BinaryMask& mask, Fn&& fn) {
    const int w = mask.width();
    const int h = mask.height();
    if (mask.empty())
        return;

    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
    std::vector<PointI> stack;
    std::vector<PointI> pixels;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!mask.foreground(x, y) || seen[idx])
                continue;
            // Row-major scan: (x, y) is the topmost-leftmost pixel.
            const PointI seed{x, y};
            pixels.clear();
            stack.push_back(seed);
            seen[idx] = 1;
            while (!stack.empty()) {
                const PointI p = stack.back();
                stack.pop_back();
                pixels.push_back(p);
                for (int d = 0; d < 8; ++d) {
                    const int nx = p.x + kDx[d];
                    const int ny = p.y + kDy[d];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                        continue;
                    const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                    if (mask.foreground(nx, ny) && !seen[nidx]) {
                        seen[nidx] = 1;
                        stack.push_back({nx, ny});
                    }
                }
            }
            fn(seed, pixels);
        }
    }
}

std::vector<Contour> find_contours(const BinaryMask& mask) {
    std::vector<Contour> contours;
    for_each_component(mask, [&](const PointI& seed, const std::vector<PointI>& pixels) {
        Contour c;
        c.points = trace_boundary(mask, seed, pixels.size());
        c.area = pixels.size();
        contours.push_back(std::move(c));
    });
    return contours;
}

Polygon convex_hull(const std::vector<PointI>& points) {
    if (points.empty())
        throw std::invalid_argument("convex_hull: empty point set");
    std::vector<PointI> pts = points;
    std::sort(pts.begin(), pts.end(), [](const PointI& a, const PointI& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    const std::size_t n = pts.size();
    if (n <= 2)
        return Polygon{pts};

    std::vector<PointI> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1); // last point repeats the first
    return Polygon{hull};
}

void rasterize_convex(const Polygon& poly, BinaryMask& out) {
    const auto& v = poly.vertices;
    if (v.empty())
        return;
    if (v.size() == 1) {
        if (v[0].x >= 0 && v[0].y >= 0 && v[0].x < out.width() && v[0].y < out.height())
            out.set(v[0].x, v[0].y, true);
        return;
    }

    int ymin = v[0].y, ymax = v[0].y;
    for (const PointI& p : v) {
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    ymin = std::max(ymin, 0);
    ymax = std::min(ymax, out.height() - 1);

    for (int y = ymin; y <= ymax; ++y) {
        // Row crossings as exact rationals num/den, den > 0.
        long long num_min = 0, den_min = 1, num_max = 0, den_max = 1;
        bool any = false;
        auto consider = [&](long long num, long long den) {
            if (!any) {
                num_min = num_max = num;
                den_min = den_max = den;
                any = true;
                return;
            }
            if (num * den_min < num_min * den) {
                num_min = num;
                den_min = den;
            }
            if (num * den_max > num_max * den) {
                num_max = num;
                den_max = den;
            }
        };
        for (std::size_t i = 0; i < v.size(); ++i) {
            const PointI a = v[i];
            const PointI b = v[(i + 1) % v.size()];
            if (a.y == b.y) {
                if (a.y == y) {
                    consider(a.x, 1);
                    consider(b.x, 1);
                }
                continue;
            }
            if (y < std::min(a.y, b.y) || y > std::max(a.y, b.y))
                continue;
            long long den = b.y - a.y;
            long long num = static_cast<long long>(a.x) * den +
                            static_cast<long long>(y - a.y) * (b.x - a.x);
            if (den < 0) {
                den = -den;
                num = -num;
            }
            consider(num, den);
        }
        if (!any)
            continue;
        int x0 = static_cast<int>(ceil_div(num_min, den_min));
        int x1 = static_cast<int>(floor_div(num_max, den_max));
        x0 = std::max(x0, 0);
        x1 = std::min(x1, out.width() - 1);
        for (int x = x0; x <= x1; ++x)
            out.set(x, y, true);
    }
}

BinaryMask fill_hulls(const BinaryMask& mask, std::size_t min_area) {
    BinaryMask out(mask.width(), mask.height());
    std::vector<PointI> boundary;
    for_each_component(mask, [&](const PointI& seed, const std::vector<PointI>& pixels) {
        if (min_area > 0 && pixels.size() < min_area)
            return;
        // Components of up to two pixels are their own filled hull.
        if (pixels.size() <= 2) {
            for (const PointI& p : pixels)
                out.set(p.x, p.y, true);
            return;
        }
        boundary = trace_boundary(mask, seed, pixels.size());
        rasterize_convex(convex_hull(boundary), out);
    });
    return out;
}

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_size(b))
        throw std::invalid_argument("intersect: dimension mismatch");
    BinaryMask out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y) {
        const std::uint8_t* ra = a.row(y);
        const std::uint8_t* rb = b.row(y);
        std::uint8_t* ro = out.row(y);
        for (int x = 0; x < a.width(); ++x)
            ro[x] = (ra[x] && rb[x]) ? BinaryMask::kFg : BinaryMask::kBg;
    }
    return out;
}

} // namespace cbseg
