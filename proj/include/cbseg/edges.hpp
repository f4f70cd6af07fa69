#pragma once

#include <optional>
#include <vector>

#include "cbseg/imagecore.hpp"

namespace cbseg {

// Non-negative per-pixel response magnitudes, same size as the source frame.
struct ResponseImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ResponseImage() = default;
    ResponseImage(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double max_value() const;
};

enum class Detector { sobel, log, canny };

struct EdgeParams {
    Detector detector = Detector::sobel;
    double theta = 0.85;          // two-level threshold selectivity, in [0, 1]
    double log_sigma = 1.4;
    double canny_sigma = 1.4;     // Gaussian pre-smoothing scale
    std::optional<double> canny_low;  // hysteresis bounds; unset = derived
    std::optional<double> canny_high; // from Otsu on the gradient histogram
    int threads = 0;
};

/// 3x3 Sobel gradient magnitude, borders replicated. Single-channel input only.
ResponseImage sobel(const Frame& gray, int threads = 0);

// |Laplacian-of-Gaussian| response. The kernel is truncated at +-ceil(3*sigma)
// and shifted to zero sum so flat regions give exactly zero.
ResponseImage log_filter(const Frame& gray, double sigma, int threads = 0);

// Full Canny chain: Gaussian smoothing, Sobel gradients, non-maximum
// suppression, hysteresis linking. Output values are 0 or 255.
ResponseImage canny(const Frame& gray, const EdgeParams& params);

ResponseImage detect_edges(const Frame& gray, const EdgeParams& params);

// Keeps pixels with response >= G*(1-theta), G the maximum response. An
// all-zero response yields an all-background mask.
BinaryMask threshold(const ResponseImage& response, double theta);

} // namespace cbseg
