#include <doctest.h>

#include <cmath>

#include "cbseg/edges.hpp"
#include "oracles.hpp"

using namespace cbseg;

namespace {

Frame gray_frame(int w, int h, std::uint8_t fill = 0) { return Frame(w, h, 1, fill); }

Frame vertical_step(int w, int h, int step_col, std::uint8_t lo = 0, std::uint8_t hi = 255) {
    Frame f(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            f.at(x, y) = x < step_col ? lo : hi;
    return f;
}

Frame transpose(const Frame& f) {
    Frame t(f.height(), f.width(), 1);
    for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x)
            t.at(y, x) = f.at(x, y);
    return t;
}

// Dense reference: direct 2-D convolution with the zero-sum LoG kernel and
// clamped indexing. The separable implementation must reproduce it.
ResponseImage log_reference(const Frame& gray, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const int n = 2 * radius + 1;
    const double s2 = sigma * sigma;
    std::vector<double> kernel(static_cast<std::size_t>(n) * n);
    double sum = 0.0;
    for (int j = -radius; j <= radius; ++j)
        for (int i = -radius; i <= radius; ++i) {
            const double r2 = static_cast<double>(i) * i + static_cast<double>(j) * j;
            const double v = (r2 - 2.0 * s2) / (s2 * s2) * std::exp(-r2 / (2.0 * s2));
            kernel[static_cast<std::size_t>(j + radius) * n + (i + radius)] = v;
            sum += v;
        }
    const double mean = sum / (static_cast<double>(n) * n);

    ResponseImage out(gray.width(), gray.height());
    for (int y = 0; y < gray.height(); ++y)
        for (int x = 0; x < gray.width(); ++x) {
            double acc = 0.0;
            for (int j = -radius; j <= radius; ++j)
                for (int i = -radius; i <= radius; ++i) {
                    const int sx = std::clamp(x + i, 0, gray.width() - 1);
                    const int sy = std::clamp(y + j, 0, gray.height() - 1);
                    const double k = kernel[static_cast<std::size_t>(j + radius) * n + (i + radius)] - mean;
                    acc += k * gray.at(sx, sy);
                }
            out.at(x, y) = std::abs(acc);
        }
    return out;
}

} // namespace

TEST_CASE("sobel of a constant image is zero") {
    const ResponseImage r = sobel(gray_frame(9, 7, 143));
    CHECK(r.max_value() == 0.0);
}

TEST_CASE("sobel rejects multi-channel input") {
    Frame rgb(3, 3, 3);
    CHECK_THROWS_AS(sobel(rgb), std::invalid_argument);
}

TEST_CASE("sobel step response peaks at 4*255 on the step columns") {
    const Frame f = vertical_step(10, 6, 5);
    const ResponseImage r = sobel(f);
    CHECK(r.max_value() == doctest::Approx(1020.0));
    for (int y = 0; y < 6; ++y) {
        CHECK(r.at(4, y) == doctest::Approx(1020.0));
        CHECK(r.at(5, y) == doctest::Approx(1020.0));
        CHECK(r.at(2, y) == doctest::Approx(0.0));
        CHECK(r.at(7, y) == doctest::Approx(0.0));
    }
}

TEST_CASE("sobel commutes with transposition") {
    oracle::Rng rng(31);
    Frame f(11, 8, 1);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 11; ++x)
            f.at(x, y) = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    const ResponseImage a = sobel(transpose(f));
    const ResponseImage b = sobel(f);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 11; ++x)
            CHECK(a.at(y, x) == doctest::Approx(b.at(x, y)).epsilon(1e-12));
}

TEST_CASE("sobel and log responses ignore a constant offset") {
    oracle::Rng rng(32);
    Frame f(12, 9, 1), g(12, 9, 1);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 12; ++x) {
            const int v = rng.uniform_int(0, 150);
            f.at(x, y) = static_cast<std::uint8_t>(v);
            g.at(x, y) = static_cast<std::uint8_t>(v + 60);
        }
    const ResponseImage sf = sobel(f), sg = sobel(g);
    const ResponseImage lf = log_filter(f, 1.4), lg = log_filter(g, 1.4);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 12; ++x) {
            CHECK(sg.at(x, y) == doctest::Approx(sf.at(x, y)).epsilon(1e-9));
            CHECK(lg.at(x, y) == doctest::Approx(lf.at(x, y)).scale(1000.0).epsilon(1e-9));
        }
}

TEST_CASE("sobel scales linearly with image intensity") {
    oracle::Rng rng(33);
    Frame f(10, 10, 1), g(10, 10, 1);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) {
            const int v = rng.uniform_int(0, 85);
            f.at(x, y) = static_cast<std::uint8_t>(v);
            g.at(x, y) = static_cast<std::uint8_t>(3 * v);
        }
    const ResponseImage sf = sobel(f), sg = sobel(g);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x)
            CHECK(sg.at(x, y) == doctest::Approx(3.0 * sf.at(x, y)).epsilon(1e-12));
}

TEST_CASE("log_filter of a constant image is zero (zero-sum kernel)") {
    const ResponseImage r = log_filter(gray_frame(14, 11, 200), 1.4);
    for (double v : r.values)
        CHECK(v == doctest::Approx(0.0).scale(1000.0).epsilon(1e-9));
}

TEST_CASE("log_filter rejects non-positive sigma") {
    CHECK_THROWS_AS(log_filter(gray_frame(4, 4), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(log_filter(gray_frame(4, 4), -1.0), std::invalid_argument);
}

TEST_CASE("log_filter impulse response equals the kernel center weight") {
    const double sigma = 1.4;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const int n = 2 * radius + 1;
    // Normalized center weight, straight from the kernel definition.
    const double s2 = sigma * sigma;
    double sum = 0.0;
    for (int j = -radius; j <= radius; ++j)
        for (int i = -radius; i <= radius; ++i) {
            const double r2 = static_cast<double>(i) * i + static_cast<double>(j) * j;
            sum += (r2 - 2.0 * s2) / (s2 * s2) * std::exp(-r2 / (2.0 * s2));
        }
    const double center = -2.0 / s2 - sum / (static_cast<double>(n) * n);

    Frame f = gray_frame(31, 31, 0);
    f.at(15, 15) = 200;
    const ResponseImage r = log_filter(f, sigma);
    CHECK(r.at(15, 15) == doctest::Approx(std::abs(center) * 200.0).epsilon(1e-9));
}

TEST_CASE("log_filter peaks next to a step edge") {
    const Frame f = vertical_step(24, 1, 12, 10, 210);
    const ResponseImage r = log_filter(f, 1.0);
    // Flat regions away from the step stay at zero.
    CHECK(r.at(2, 0) == doctest::Approx(0.0).scale(1000.0).epsilon(1e-9));
    CHECK(r.at(21, 0) == doctest::Approx(0.0).scale(1000.0).epsilon(1e-9));
    // |response| is maximal immediately either side of the step.
    int argmax = 0;
    for (int x = 0; x < 24; ++x)
        if (r.at(x, 0) > r.at(argmax, 0))
            argmax = x;
    CHECK((argmax == 11 || argmax == 12));
    CHECK(r.at(11, 0) == doctest::Approx(r.at(12, 0)).epsilon(1e-9)); // symmetric pair
}

TEST_CASE("log_filter separable path matches the dense reference") {
    oracle::Rng rng(34);
    for (double sigma : {0.8, 1.4, 2.0}) {
        Frame f(20, 15, 1);
        for (int y = 0; y < 15; ++y)
            for (int x = 0; x < 20; ++x)
                f.at(x, y) = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        const ResponseImage got = log_filter(f, sigma);
        const ResponseImage expect = log_reference(f, sigma);
        for (std::size_t i = 0; i < got.values.size(); ++i)
            CHECK(got.values[i] == doctest::Approx(expect.values[i]).scale(1000.0).epsilon(1e-9));
    }
}

TEST_CASE("canny of a constant image is zero") {
    EdgeParams p;
    p.detector = Detector::canny;
    const ResponseImage r = canny(gray_frame(16, 12, 77), p);
    CHECK(r.max_value() == 0.0);
}

TEST_CASE("canny thins a clean vertical step to one pixel per row") {
    EdgeParams p;
    const Frame f = vertical_step(32, 20, 16);
    const ResponseImage r = canny(f, p);
    for (int y = 0; y < 20; ++y) {
        int responders = 0;
        for (int x = 0; x < 32; ++x) {
            CHECK((r.at(x, y) == 0.0 || r.at(x, y) == 255.0));
            if (r.at(x, y) == 255.0)
                ++responders;
        }
        CHECK(responders == 1);
    }
}

TEST_CASE("canny validates its parameters") {
    EdgeParams p;
    p.canny_low = 10.0;
    p.canny_high = 5.0;
    CHECK_THROWS_AS(canny(gray_frame(4, 4), p), std::invalid_argument);
    EdgeParams q;
    q.canny_sigma = 0.0;
    CHECK_THROWS_AS(canny(gray_frame(4, 4), q), std::invalid_argument);
}

TEST_CASE("threshold keeps responses at or above G*(1-theta)") {
    ResponseImage r(4, 1);
    r.at(0, 0) = 200.0; // G
    r.at(1, 0) = 30.0;  // exactly phi for theta = 0.85
    r.at(2, 0) = 29.0;
    r.at(3, 0) = 0.0;
    const BinaryMask m = threshold(r, 0.85);
    CHECK(m.foreground(0, 0));
    CHECK(m.foreground(1, 0));
    CHECK_FALSE(m.foreground(2, 0));
    CHECK_FALSE(m.foreground(3, 0));
}

TEST_CASE("threshold limit cases") {
    ResponseImage r(3, 1);
    r.at(0, 0) = 5.0;
    r.at(1, 0) = 0.0;
    r.at(2, 0) = 10.0;

    // theta = 1: phi = 0, and 0 >= 0, so everything is foreground.
    const BinaryMask all = threshold(r, 1.0);
    CHECK(all.foreground_count() == 3);

    // theta = 0: phi = G, only maximal responses survive.
    const BinaryMask maxonly = threshold(r, 0.0);
    CHECK(maxonly.foreground_count() == 1);
    CHECK(maxonly.foreground(2, 0));

    // All-zero response stays all-background even though 0 >= phi = 0.
    const BinaryMask empty = threshold(ResponseImage(5, 5), 1.0);
    CHECK(empty.foreground_count() == 0);

    CHECK_THROWS_AS(threshold(r, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(threshold(r, 1.1), std::invalid_argument);
}

TEST_CASE("threshold foreground set grows with theta") {
    oracle::Rng rng(35);
    ResponseImage r(16, 12);
    for (double& v : r.values)
        v = rng.uniform_real(0.0, 500.0);
    BinaryMask prev = threshold(r, 0.0);
    for (double theta : {0.2, 0.5, 0.8, 0.95, 1.0}) {
        const BinaryMask cur = threshold(r, theta);
        for (int y = 0; y < 12; ++y)
            for (int x = 0; x < 16; ++x)
                if (prev.foreground(x, y))
                    CHECK(cur.foreground(x, y));
        prev = cur;
    }
}

TEST_CASE("detector outputs match input dimensions") {
    const Frame f = vertical_step(13, 9, 6);
    for (Detector d : {Detector::sobel, Detector::log, Detector::canny}) {
        EdgeParams p;
        p.detector = d;
        const ResponseImage r = detect_edges(f, p);
        CHECK(r.width == 13);
        CHECK(r.height == 9);
        for (double v : r.values)
            CHECK(v >= 0.0);
    }
}
