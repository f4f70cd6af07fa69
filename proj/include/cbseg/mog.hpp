#pragma once

#include <vector>

#include "cbseg/imagecore.hpp"

namespace cbseg {

struct MogParams {
    double learning_rate = 0.01;      // weight adaptation rate
    double second_rate = 0.001;       // mean/variance blend rate
    int component_count = 5;          // K
    double background_fraction = 0.8; // weight prefix treated as background
    double match_sigma = 2.5;         // match radius in standard deviations
    double initial_variance = 225.0;  // for fresh/replacement components
    double initial_weight = 0.05;

    void validate() const;
};

// Isotropic Gaussian with a scalar variance shared across channels.
struct GaussianComponent {
    Vec3 mean;
    double variance = 225.0;
    double weight = 0.0;
};

// One online step for a pixel: match, adapt weights/means, replace on miss,
// renormalize, rank by weight/sigma. Returns true when the pixel classifies
// foreground. With learning_rate == 0 the mixture is left untouched and the
// call is a pure classifier.
bool mog_observe(const Vec3& pixel, std::vector<GaussianComponent>& components,
                 const MogParams& params);

class MogModel {
public:
    MogModel(int width, int height, MogParams params);

    /// Observes every pixel of the frame and returns the foreground mask.
    BinaryMask segment(const Frame& frame, int threads = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    const MogParams& params() const { return params_; }
    const std::vector<GaussianComponent>& pixel(int x, int y) const {
        return grid_[static_cast<std::size_t>(y) * width_ + x];
    }
    std::vector<GaussianComponent>& pixel(int x, int y) {
        return grid_[static_cast<std::size_t>(y) * width_ + x];
    }

private:
    int width_;
    int height_;
    MogParams params_;
    std::vector<std::vector<GaussianComponent>> grid_;
};

} // namespace cbseg
