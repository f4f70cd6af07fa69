#include "cbseg/edges.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cbseg/parallel.hpp"

namespace cbseg {

namespace {

// Per-thread scratch planes reused across calls; fresh allocations of this
// size go through mmap and the page faults dominate the convolution cost.
struct Scratch {
    std::vector<double> padded;
    std::vector<double> plane_a;
    std::vector<double> plane_b;
    std::vector<double> plane_c;
    std::vector<double> plane_d;
    std::vector<double> plane_e;
};

Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

// Image padded by `radius` on every side with replicated edges, stored as
// doubles so the separable passes run without boundary branches.
struct Padded {
    int width = 0;   // padded width
    int height = 0;  // padded height
    int radius = 0;
    std::vector<double>* data = nullptr;

    const double* row(int y) const { return data->data() + static_cast<std::size_t>(y) * width; }
    double* row(int y) { return data->data() + static_cast<std::size_t>(y) * width; }
};

Padded pad_replicate(const Frame& gray, int radius, std::vector<double>& buffer) {
    Padded p;
    p.radius = radius;
    p.width = gray.width() + 2 * radius;
    p.height = gray.height() + 2 * radius;
    p.data = &buffer;
    buffer.resize(static_cast<std::size_t>(p.width) * p.height);
    for (int y = 0; y < p.height; ++y) {
        const int sy = std::clamp(y - radius, 0, gray.height() - 1);
        const std::uint8_t* src = gray.row(sy);
        double* dst = p.row(y);
        for (int x = 0; x < radius; ++x)
            dst[x] = src[0];
        for (int x = 0; x < gray.width(); ++x)
            dst[radius + x] = src[x];
        for (int x = 0; x < radius; ++x)
            dst[radius + gray.width() + x] = src[gray.width() - 1];
    }
    return p;
}

void require_gray(const Frame& frame, const char* op) {
    if (frame.channels() != 1)
        throw std::invalid_argument(std::string(op) + ": input must be single-channel");
}

// Gradient and magnitude planes for canny(), one fused pass.
void sobel_gradients(const std::vector<double>& img, int w, int h, int threads,
                     std::vector<double>& gx, std::vector<double>& gy, std::vector<double>& mag) {
    gx.resize(static_cast<std::size_t>(w) * h);
    gy.resize(static_cast<std::size_t>(w) * h);
    mag.resize(static_cast<std::size_t>(w) * h);
    parallel_rows(h, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const double* rm = img.data() + static_cast<std::size_t>(std::max(y - 1, 0)) * w;
            const double* r0 = img.data() + static_cast<std::size_t>(y) * w;
            const double* rp = img.data() + static_cast<std::size_t>(std::min(y + 1, h - 1)) * w;
            double* ox = gx.data() + static_cast<std::size_t>(y) * w;
            double* oy = gy.data() + static_cast<std::size_t>(y) * w;
            double* om = mag.data() + static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) {
                const int xm = std::max(x - 1, 0);
                const int xp = std::min(x + 1, w - 1);
                const double dx = (rm[xp] + 2.0 * r0[xp] + rp[xp]) - (rm[xm] + 2.0 * r0[xm] + rp[xm]);
                const double dy = (rp[xm] + 2.0 * rp[x] + rp[xp]) - (rm[xm] + 2.0 * rm[x] + rm[xp]);
                ox[x] = dx;
                oy[x] = dy;
                om[x] = std::sqrt(dx * dx + dy * dy);
            }
        }
    });
}

std::vector<double> gaussian_kernel_1d(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k)
        v /= sum;
    return k;
}

// Separable smoothing with replicated borders into a caller-provided plane.
// Both passes run tap-outer / pixel-inner so every inner loop is a
// unit-stride multiply-accumulate.
void gaussian_smooth(const Frame& gray, double sigma, int threads, std::vector<double>& padbuf,
                     std::vector<double>& tmp, std::vector<double>& out) {
    const int w = gray.width();
    const int h = gray.height();
    const std::vector<double> k = gaussian_kernel_1d(sigma);
    const int n = static_cast<int>(k.size());
    const int radius = (n - 1) / 2;
    const Padded p = pad_replicate(gray, radius, padbuf);

    // Horizontal pass over all padded rows, then vertical into the output.
    // The kernel is even, so mirrored taps fold into one pass each.
    tmp.resize(static_cast<std::size_t>(w) * p.height);
    parallel_rows(p.height, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const double* src = p.row(y);
            double* dst = tmp.data() + static_cast<std::size_t>(y) * w;
            const double kc = k[radius];
            const double* c = src + radius;
            for (int x = 0; x < w; ++x)
                dst[x] = kc * c[x];
            for (int i = 0; i < radius; ++i) {
                const double ki = k[i];
                const double* lo = src + i;
                const double* hi = src + (n - 1 - i);
                for (int x = 0; x < w; ++x)
                    dst[x] += ki * (lo[x] + hi[x]);
            }
        }
    });
    out.resize(static_cast<std::size_t>(w) * h);
    parallel_rows(h, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            double* dst = out.data() + static_cast<std::size_t>(y) * w;
            const double kc = k[radius];
            const double* c = tmp.data() + static_cast<std::size_t>(y + radius) * w;
            for (int x = 0; x < w; ++x)
                dst[x] = kc * c[x];
            for (int i = 0; i < radius; ++i) {
                const double ki = k[i];
                const double* lo = tmp.data() + static_cast<std::size_t>(y + i) * w;
                const double* hi = tmp.data() + static_cast<std::size_t>(y + n - 1 - i) * w;
                for (int x = 0; x < w; ++x)
                    dst[x] += ki * (lo[x] + hi[x]);
            }
        }
    });
}

// Otsu's threshold over a 256-bin histogram of the values in (0, max].
double otsu_threshold(const std::vector<double>& values, double max_value) {
    constexpr int kBins = 256;
    std::vector<double> hist(kBins, 0.0);
    const double scale = (kBins - 1) / max_value;
    for (double v : values) {
        int bin = static_cast<int>(v * scale);
        bin = std::clamp(bin, 0, kBins - 1);
        hist[bin] += 1.0;
    }
    const double total = static_cast<double>(values.size());
    double sum_all = 0.0;
    for (int i = 0; i < kBins; ++i)
        sum_all += i * hist[i];
    double sum_bg = 0.0, weight_bg = 0.0, best_var = -1.0;
    int best_bin = 0;
    for (int i = 0; i < kBins; ++i) {
        weight_bg += hist[i];
        if (weight_bg == 0.0)
            continue;
        const double weight_fg = total - weight_bg;
        if (weight_fg == 0.0)
            break;
        sum_bg += i * hist[i];
        const double mean_bg = sum_bg / weight_bg;
        const double mean_fg = (sum_all - sum_bg) / weight_fg;
        const double between = weight_bg * weight_fg * (mean_bg - mean_fg) * (mean_bg - mean_fg);
        if (between > best_var) {
            best_var = between;
            best_bin = i;
        }
    }
    return (best_bin + 0.5) / (kBins - 1) * max_value;
}

} // namespace

double ResponseImage::max_value() const {
    double m = 0.0;
    for (double v : values)
        m = std::max(m, v);
    return m;
}

ResponseImage sobel(const Frame& gray, int threads) {
    require_gray(gray, "sobel");
    const int w = gray.width();
    const int h = gray.height();
    ResponseImage out(w, h);
    parallel_rows(h, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const std::uint8_t* rm = gray.row(std::max(y - 1, 0));
            const std::uint8_t* r0 = gray.row(y);
            const std::uint8_t* rp = gray.row(std::min(y + 1, h - 1));
            double* dst = out.values.data() + static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) {
                const int xm = std::max(x - 1, 0);
                const int xp = std::min(x + 1, w - 1);
                const int gx = (rm[xp] + 2 * r0[xp] + rp[xp]) - (rm[xm] + 2 * r0[xm] + rp[xm]);
                const int gy = (rp[xm] + 2 * rp[x] + rp[xp]) - (rm[xm] + 2 * rm[x] + rm[xp]);
                dst[x] = std::sqrt(static_cast<double>(gx) * gx + static_cast<double>(gy) * gy);
            }
        }
    });
    return out;
}

ResponseImage log_filter(const Frame& gray, double sigma, int threads) {
    require_gray(gray, "log_filter");
    if (sigma <= 0.0)
        throw std::invalid_argument("log_filter: sigma must be positive");

    const int w = gray.width();
    const int h = gray.height();
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const int n = 2 * radius + 1;

    // LoG(x,y) = (x^2 + y^2 - 2s^2)/s^4 * exp(-(x^2+y^2)/(2s^2)) factors as
    // gxx(x)g(y) + g(x)gyy(y), so two separable passes reproduce the 2-D
    // kernel exactly. The zero-sum shift is applied afterwards through a box
    // sum: conv(K - m) = conv(K) - m * boxsum.
    std::vector<double> g(n), gxx(n);
    const double s2 = sigma * sigma;
    for (int i = -radius; i <= radius; ++i) {
        const double e = std::exp(-(static_cast<double>(i) * i) / (2.0 * s2));
        g[i + radius] = e;
        gxx[i + radius] = (static_cast<double>(i) * i - s2) / (s2 * s2) * e;
    }
    double kernel_sum = 0.0;
    for (int x = -radius; x <= radius; ++x)
        for (int y = -radius; y <= radius; ++y)
            kernel_sum += gxx[x + radius] * g[y + radius] + g[x + radius] * gxx[y + radius];
    const double mean = kernel_sum / (static_cast<double>(n) * n);

    Scratch& sc = scratch();
    const Padded p = pad_replicate(gray, radius, sc.padded);
    // Horizontal pass: smoothed, second-derivative and box accumulations,
    // tap-outer so the inner loops stay unit-stride. The box term slides.
    std::vector<double>& hg = sc.plane_a;
    std::vector<double>& hxx = sc.plane_b;
    std::vector<double>& hbox = sc.plane_c;
    hg.assign(static_cast<std::size_t>(w) * p.height, 0.0);
    hxx.assign(static_cast<std::size_t>(w) * p.height, 0.0);
    hbox.resize(static_cast<std::size_t>(w) * p.height);
    parallel_rows(p.height, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const double* src = p.row(y);
            double* dg = hg.data() + static_cast<std::size_t>(y) * w;
            double* dxx = hxx.data() + static_cast<std::size_t>(y) * w;
            double* dbox = hbox.data() + static_cast<std::size_t>(y) * w;
            const double gc = g[radius];
            const double xc = gxx[radius];
            const double* c = src + radius;
            for (int x = 0; x < w; ++x) {
                dg[x] = gc * c[x];
                dxx[x] = xc * c[x];
            }
            for (int i = 0; i < radius; ++i) {
                const double gi = g[i];
                const double xi = gxx[i];
                const double* lo = src + i;
                const double* hi = src + (n - 1 - i);
                for (int x = 0; x < w; ++x) {
                    const double s = lo[x] + hi[x];
                    dg[x] += gi * s;
                    dxx[x] += xi * s;
                }
            }
            double window = 0.0;
            for (int i = 0; i < n; ++i)
                window += src[i];
            for (int x = 0; x < w; ++x) {
                dbox[x] = window;
                if (x + 1 < w)
                    window += src[x + n] - src[x];
            }
        }
    });
    ResponseImage out(w, h);
    parallel_rows(h, threads, [&](int y0, int y1) {
        std::vector<double> lap(w);
        // The vertical box sum slides down the block one row at a time.
        std::vector<double> box(w, 0.0);
        for (int i = 0; i < n; ++i) {
            const std::size_t r = static_cast<std::size_t>(y0 + i) * w;
            for (int x = 0; x < w; ++x)
                box[x] += hbox[r + x];
        }
        for (int y = y0; y < y1; ++y) {
            const double gc = g[radius];
            const double xc = gxx[radius];
            const std::size_t rc = static_cast<std::size_t>(y + radius) * w;
            for (int x = 0; x < w; ++x)
                lap[x] = gc * hxx[rc + x] + xc * hg[rc + x];
            for (int i = 0; i < radius; ++i) {
                const double gi = g[i];
                const double xi = gxx[i];
                const std::size_t rlo = static_cast<std::size_t>(y + i) * w;
                const std::size_t rhi = static_cast<std::size_t>(y + n - 1 - i) * w;
                for (int x = 0; x < w; ++x)
                    lap[x] += gi * (hxx[rlo + x] + hxx[rhi + x]) + xi * (hg[rlo + x] + hg[rhi + x]);
            }
            double* dst = out.values.data() + static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x)
                dst[x] = std::abs(lap[x] - mean * box[x]);
            if (y + 1 < y1) {
                const std::size_t drop = static_cast<std::size_t>(y) * w;
                const std::size_t add = static_cast<std::size_t>(y + n) * w;
                for (int x = 0; x < w; ++x)
                    box[x] += hbox[add + x] - hbox[drop + x];
            }
        }
    });
    return out;
}

ResponseImage canny(const Frame& gray, const EdgeParams& params) {
    require_gray(gray, "canny");
    if (params.canny_low && params.canny_high && *params.canny_low > *params.canny_high)
        throw std::invalid_argument("canny: low threshold exceeds high threshold");
    if (params.canny_sigma <= 0.0)
        throw std::invalid_argument("canny: smoothing sigma must be positive");

    const int w = gray.width();
    const int h = gray.height();
    const int threads = params.threads;
    Scratch& sc = scratch();
    std::vector<double>& smoothed = sc.plane_a;
    gaussian_smooth(gray, params.canny_sigma, threads, sc.padded, sc.plane_b, smoothed);
    std::vector<double>& gx = sc.plane_b;
    std::vector<double>& gy = sc.plane_c;
    std::vector<double>& mag = sc.plane_d;
    sobel_gradients(smoothed, w, h, threads, gx, gy, mag);
    double max_mag = 0.0;
    for (double v : mag)
        max_mag = std::max(max_mag, v);
    ResponseImage out(w, h);
    if (max_mag == 0.0)
        return out;

    double high = params.canny_high ? *params.canny_high : otsu_threshold(mag, max_mag);
    double low = params.canny_low ? *params.canny_low : 0.4 * high;
    if (low > high)
        low = high;

    // Non-maximum suppression with the gradient direction quantized to four
    // sectors. Ties are broken asymmetrically (strict against the preceding
    // neighbor) so a symmetric two-pixel ridge thins to a single line. Pixels
    // below the weak threshold can never join an edge, so they are skipped
    // outright.
    constexpr double kTan22 = 0.41421356237309503;
    constexpr double kTan67 = 2.414213562373095;
    std::vector<double>& nms = sc.plane_e;
    nms.assign(static_cast<std::size_t>(w) * h, 0.0);
    parallel_rows(h, threads, [&](int y0, int y1) {
        auto suppress = [&](int x, int y, auto&& neighbor) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (mag[i] < low || mag[i] == 0.0)
                return;
            const double ax = std::abs(gx[i]);
            const double ay = std::abs(gy[i]);
            int dx, dy;
            if (ay <= kTan22 * ax) {
                dx = 1; dy = 0;
            } else if (ay >= kTan67 * ax) {
                dx = 0; dy = 1;
            } else if ((gx[i] > 0) == (gy[i] > 0)) {
                dx = 1; dy = 1;
            } else {
                dx = 1; dy = -1;
            }
            if (mag[i] > neighbor(x - dx, y - dy) && mag[i] >= neighbor(x + dx, y + dy))
                nms[i] = mag[i];
        };
        auto clamped = [&](int x, int y) {
            x = std::clamp(x, 0, w - 1);
            y = std::clamp(y, 0, h - 1);
            return mag[static_cast<std::size_t>(y) * w + x];
        };
        auto direct = [&](int x, int y) { return mag[static_cast<std::size_t>(y) * w + x]; };
        for (int y = y0; y < y1; ++y) {
            const bool border_row = y == 0 || y == h - 1;
            suppress(0, y, clamped);
            if (border_row) {
                for (int x = 1; x < w - 1; ++x)
                    suppress(x, y, clamped);
            } else {
                for (int x = 1; x < w - 1; ++x)
                    suppress(x, y, direct);
            }
            if (w > 1)
                suppress(w - 1, y, clamped);
        }
    });

    // Hysteresis: seed from strong pixels, grow through weak ones (8-conn).
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < nms.size(); ++i) {
        if (nms[i] >= high && out.values[i] == 0.0) {
            out.values[i] = 255.0;
            stack.push_back(i);
            while (!stack.empty()) {
                const std::size_t idx = stack.back();
                stack.pop_back();
                const int cx = static_cast<int>(idx % w);
                const int cy = static_cast<int>(idx / w);
                for (int ny = cy - 1; ny <= cy + 1; ++ny) {
                    for (int nx = cx - 1; nx <= cx + 1; ++nx) {
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                            continue;
                        const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                        if (out.values[nidx] == 0.0 && nms[nidx] >= low) {
                            out.values[nidx] = 255.0;
                            stack.push_back(nidx);
                        }
                    }
                }
            }
        }
    }
    return out;
}

ResponseImage detect_edges(const Frame& gray, const EdgeParams& params) {
    switch (params.detector) {
    case Detector::sobel:
        return sobel(gray, params.threads);
    case Detector::log:
        return log_filter(gray, params.log_sigma, params.threads);
    case Detector::canny:
        return canny(gray, params);
    }
    throw std::invalid_argument("detect_edges: unknown detector");
}

BinaryMask threshold(const ResponseImage& response, double theta) {
    if (theta < 0.0 || theta > 1.0)
        throw std::invalid_argument("threshold: theta must be in [0, 1]");
    BinaryMask mask(response.width, response.height);
    const double g = response.max_value();
    if (g == 0.0)
        return mask;
    // phi = G*(1-theta); the slack keeps responses that tie with phi on the
    // foreground side when the product picks up rounding noise.
    const double phi = g * (1.0 - theta) - 1e-9;
    for (int y = 0; y < response.height; ++y) {
        std::uint8_t* row = mask.row(y);
        const double* src = response.values.data() + static_cast<std::size_t>(y) * response.width;
        for (int x = 0; x < response.width; ++x)
            row[x] = src[x] >= phi ? BinaryMask::kFg : BinaryMask::kBg;
    }
    return mask;
}

} // namespace cbseg
